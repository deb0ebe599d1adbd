//! Group models with a solvable word problem.
//!
//! Four families are supported: finite groups given by a multiplication
//! table, free abelian groups `Z^n`, free groups `F_k`, and free products of
//! finite groups. Every element is stored in a canonical form (index, integer
//! vector, freely reduced word, or alternating syllable word), so element
//! equality is plain key equality.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GroupError {
    #[error("element belongs to model {found:#x}, expected model {expected:#x}")]
    ModelMismatch { expected: u64, found: u64 },
    #[error("cannot parse group spec `{0}`")]
    BadSpec(String),
    #[error("cannot parse `{word}` as an element of {model}: {reason}")]
    BadWord {
        word: String,
        model: String,
        reason: String,
    },
    #[error("invalid multiplication table: {0}")]
    InvalidTable(String),
    #[error("`all` generators require a finite group")]
    AllRequiresFinite,
    #[error("power_union exponent must be at least 1")]
    ZeroPower,
    #[error("io error reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// One syllable of a free-product normal form: a non-identity element of a factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Syllable {
    pub factor: u32,
    pub elem: u32,
}

/// Canonical form of an element.
///
/// Free-group letters are `g + 1` for generator `g` and `-(g + 1)` for its inverse.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Key {
    Finite(u32),
    Abelian(Vec<i64>),
    Free(Vec<i32>),
    FreeProduct(Vec<Syllable>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element {
    model: u64,
    key: Key,
}

impl Element {
    pub fn key(&self) -> &Key {
        &self.key
    }

    pub fn model_id(&self) -> u64 {
        self.model
    }
}

/// A finite group given by its Cayley table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteTable {
    order: usize,
    table: Arc<Vec<u32>>,
    identity: u32,
    inverses: Vec<u32>,
}

const MAX_TABLE_ORDER: usize = 4096;

impl FiniteTable {
    /// Validates `rows` as a group table: square, Latin, with an identity, associative.
    pub fn from_rows(rows: &[Vec<u32>]) -> Result<Self, GroupError> {
        let n = rows.len();
        if n == 0 {
            return Err(GroupError::InvalidTable("empty table".into()));
        }
        if n > MAX_TABLE_ORDER {
            return Err(GroupError::InvalidTable(format!(
                "order {n} exceeds the supported maximum {MAX_TABLE_ORDER}"
            )));
        }
        let mut table = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(GroupError::InvalidTable(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for &x in row {
                if x as usize >= n {
                    return Err(GroupError::InvalidTable(format!("entry {x} out of range")));
                }
            }
            table.extend_from_slice(row);
        }
        let at = |a: usize, b: usize| table[a * n + b] as usize;
        for i in 0..n {
            let mut row_seen = vec![false; n];
            let mut col_seen = vec![false; n];
            for j in 0..n {
                if std::mem::replace(&mut row_seen[at(i, j)], true) {
                    return Err(GroupError::InvalidTable(format!("row {i} repeats a value")));
                }
                if std::mem::replace(&mut col_seen[at(j, i)], true) {
                    return Err(GroupError::InvalidTable(format!(
                        "column {i} repeats a value"
                    )));
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| at(e, x) == x && at(x, e) == x))
            .ok_or_else(|| GroupError::InvalidTable("no identity element".into()))?;
        for a in 0..n {
            for b in 0..n {
                let ab = at(a, b);
                for c in 0..n {
                    if at(ab, c) != at(a, at(b, c)) {
                        return Err(GroupError::InvalidTable(format!(
                            "not associative at ({a},{b},{c})"
                        )));
                    }
                }
            }
        }
        let inverses = (0..n)
            .map(|a| (0..n).find(|&b| at(a, b) == identity).unwrap() as u32)
            .collect();
        Ok(FiniteTable {
            order: n,
            table: Arc::new(table),
            identity: identity as u32,
            inverses,
        })
    }

    pub fn cyclic(n: usize) -> Result<Self, GroupError> {
        if n == 0 || n > MAX_TABLE_ORDER {
            return Err(GroupError::InvalidTable(format!(
                "cyclic order {n} unsupported"
            )));
        }
        let table: Vec<u32> = (0..n * n).map(|k| ((k / n + k % n) % n) as u32).collect();
        let inverses = (0..n).map(|a| ((n - a) % n) as u32).collect();
        Ok(FiniteTable {
            order: n,
            table: Arc::new(table),
            identity: 0,
            inverses,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> u32 {
        self.identity
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.table[a as usize * self.order + b as usize]
    }

    pub fn inv(&self, a: u32) -> u32 {
        self.inverses[a as usize]
    }

    /// Greedy generating set: scan elements by index, keep any element not yet
    /// in the subgroup generated so far.
    fn greedy_generators(&self) -> Vec<u32> {
        let mut gens = Vec::new();
        let mut span: HashSet<u32> = HashSet::from([self.identity]);
        for g in 0..self.order as u32 {
            if span.contains(&g) {
                continue;
            }
            gens.push(g);
            span = self.closure(&gens);
            if span.len() == self.order {
                break;
            }
        }
        gens
    }

    fn closure(&self, gens: &[u32]) -> HashSet<u32> {
        let mut seen = HashSet::from([self.identity]);
        let mut queue = VecDeque::from([self.identity]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                for y in [self.mul(x, g), self.mul(x, self.inv(g))] {
                    if seen.insert(y) {
                        queue.push_back(y);
                    }
                }
            }
        }
        seen
    }

    fn fingerprint(&self) -> String {
        let body: Vec<String> = self.table.iter().map(u32::to_string).collect();
        format!("table[{}]", body.join(","))
    }
}

#[derive(Clone, Debug)]
pub enum ModelKind {
    Finite(FiniteTable),
    FreeAbelian { rank: usize },
    Free { rank: usize },
    FreeProduct { factors: Vec<FiniteTable> },
}

/// Verdict of [`GroupModel::generates_check`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Generation {
    Generates,
    GeneratesAtLeastDefaults,
    Unknown,
}

/// An immutable group model. Cloning is cheap.
#[derive(Clone, Debug)]
pub struct GroupModel {
    id: u64,
    description: String,
    kind: ModelKind,
}

fn fnv1a(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

const LETTERS: &[u8] = b"abcdefghijklmnopqrstuvwxyz";

impl GroupModel {
    fn with_kind(description: String, fingerprint: &str, kind: ModelKind) -> Self {
        GroupModel {
            id: fnv1a(fingerprint),
            description,
            kind,
        }
    }

    pub fn finite(table: FiniteTable, description: impl Into<String>) -> Self {
        let fp = table.fingerprint();
        Self::with_kind(description.into(), &fp, ModelKind::Finite(table))
    }

    pub fn cyclic(n: usize) -> Result<Self, GroupError> {
        Ok(Self::finite(FiniteTable::cyclic(n)?, format!("cyclic:{n}")))
    }

    pub fn free_abelian(rank: usize) -> Result<Self, GroupError> {
        if rank == 0 {
            return Err(GroupError::BadSpec("z^0".into()));
        }
        let d = format!("z^{rank}");
        Ok(Self::with_kind(
            d.clone(),
            &d,
            ModelKind::FreeAbelian { rank },
        ))
    }

    pub fn free(rank: usize) -> Result<Self, GroupError> {
        if rank == 0 || rank > LETTERS.len() {
            return Err(GroupError::BadSpec(format!("free:{rank}")));
        }
        let d = format!("free:{rank}");
        Ok(Self::with_kind(d.clone(), &d, ModelKind::Free { rank }))
    }

    pub fn free_product(factors: Vec<FiniteTable>) -> Result<Self, GroupError> {
        if factors.is_empty() || factors.len() > LETTERS.len() {
            return Err(GroupError::BadSpec("freeprod needs 1..=26 factors".into()));
        }
        let fp: Vec<String> = factors.iter().map(FiniteTable::fingerprint).collect();
        let desc: Vec<String> = factors
            .iter()
            .map(|f| format!("order {}", f.order))
            .collect();
        Ok(Self::with_kind(
            format!("freeprod({})", desc.join(",")),
            &format!("freeprod[{}]", fp.join(";")),
            ModelKind::FreeProduct { factors },
        ))
    }

    /// Parses the group mini-language: `cyclic:n`, `table:FILE`, `z^n`,
    /// `free:k`, `freeprod:F1,F2,...` where each factor is `cyclic:n` or `table:FILE`.
    pub fn from_spec(spec: &str) -> Result<Self, GroupError> {
        let spec = spec.trim();
        let bad = || GroupError::BadSpec(spec.to_string());
        if let Some(rest) = spec.strip_prefix("freeprod:") {
            let factors = rest
                .split(',')
                .map(|f| parse_finite_spec(f.trim()).map(|(t, _)| t))
                .collect::<Result<Vec<_>, _>>()?;
            let mut model = Self::free_product(factors)?;
            model.description = spec.to_string();
            return Ok(model);
        }
        if spec.starts_with("cyclic:") || spec.starts_with("table:") {
            let (table, desc) = parse_finite_spec(spec)?;
            return Ok(Self::finite(table, desc));
        }
        if let Some(rank) = spec.strip_prefix("z^") {
            return Self::free_abelian(rank.parse().map_err(|_| bad())?);
        }
        if spec == "z" {
            return Self::free_abelian(1);
        }
        if let Some(rank) = spec.strip_prefix("free:") {
            return Self::free(rank.parse().map_err(|_| bad())?);
        }
        Err(bad())
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    /// Group order, `None` for infinite models.
    pub fn order(&self) -> Option<usize> {
        match &self.kind {
            ModelKind::Finite(t) => Some(t.order),
            ModelKind::FreeProduct { factors } if factors.len() == 1 => Some(factors[0].order),
            _ => None,
        }
    }

    fn elem(&self, key: Key) -> Element {
        Element {
            model: self.id,
            key,
        }
    }

    fn check(&self, a: &Element) -> Result<(), GroupError> {
        if a.model == self.id {
            Ok(())
        } else {
            Err(GroupError::ModelMismatch {
                expected: self.id,
                found: a.model,
            })
        }
    }

    pub fn identity(&self) -> Element {
        self.elem(match &self.kind {
            ModelKind::Finite(t) => Key::Finite(t.identity),
            ModelKind::FreeAbelian { rank } => Key::Abelian(vec![0; *rank]),
            ModelKind::Free { .. } => Key::Free(Vec::new()),
            ModelKind::FreeProduct { .. } => Key::FreeProduct(Vec::new()),
        })
    }

    pub fn is_identity(&self, a: &Element) -> bool {
        *a == self.identity()
    }

    pub fn mul(&self, a: &Element, b: &Element) -> Result<Element, GroupError> {
        self.check(a)?;
        self.check(b)?;
        let key = match (&self.kind, &a.key, &b.key) {
            (ModelKind::Finite(t), Key::Finite(x), Key::Finite(y)) => Key::Finite(t.mul(*x, *y)),
            (ModelKind::FreeAbelian { .. }, Key::Abelian(x), Key::Abelian(y)) => {
                Key::Abelian(x.iter().zip(y).map(|(p, q)| p + q).collect())
            }
            (ModelKind::Free { .. }, Key::Free(x), Key::Free(y)) => {
                let mut w = x.clone();
                for &l in y {
                    push_free_letter(&mut w, l);
                }
                Key::Free(w)
            }
            (ModelKind::FreeProduct { factors }, Key::FreeProduct(x), Key::FreeProduct(y)) => {
                let mut w = x.clone();
                for &s in y {
                    push_syllable(factors, &mut w, s);
                }
                Key::FreeProduct(w)
            }
            _ => unreachable!("element key does not match its model"),
        };
        Ok(self.elem(key))
    }

    pub fn inv(&self, a: &Element) -> Result<Element, GroupError> {
        self.check(a)?;
        let key = match (&self.kind, &a.key) {
            (ModelKind::Finite(t), Key::Finite(x)) => Key::Finite(t.inv(*x)),
            (ModelKind::FreeAbelian { .. }, Key::Abelian(x)) => {
                Key::Abelian(x.iter().map(|v| -v).collect())
            }
            (ModelKind::Free { .. }, Key::Free(x)) => {
                Key::Free(x.iter().rev().map(|l| -l).collect())
            }
            (ModelKind::FreeProduct { factors }, Key::FreeProduct(x)) => Key::FreeProduct(
                x.iter()
                    .rev()
                    .map(|s| Syllable {
                        factor: s.factor,
                        elem: factors[s.factor as usize].inv(s.elem),
                    })
                    .collect(),
            ),
            _ => unreachable!("element key does not match its model"),
        };
        Ok(self.elem(key))
    }

    /// Normalizes an arbitrary key (for example an unreduced word) into canonical form.
    pub fn canonical(&self, key: Key) -> Result<Element, GroupError> {
        let bad = |reason: &str| GroupError::BadWord {
            word: format!("{key:?}"),
            model: self.description.clone(),
            reason: reason.to_string(),
        };
        let key = match (&self.kind, &key) {
            (ModelKind::Finite(t), Key::Finite(x)) if (*x as usize) < t.order => key,
            (ModelKind::FreeAbelian { rank }, Key::Abelian(v)) if v.len() == *rank => key,
            (ModelKind::Free { rank }, Key::Free(w)) => {
                if w.iter()
                    .any(|&l| l == 0 || l.unsigned_abs() as usize > *rank)
                {
                    return Err(bad("letter out of range"));
                }
                let mut out = Vec::with_capacity(w.len());
                for &l in w {
                    push_free_letter(&mut out, l);
                }
                Key::Free(out)
            }
            (ModelKind::FreeProduct { factors }, Key::FreeProduct(w)) => {
                let mut out = Vec::with_capacity(w.len());
                for &s in w {
                    let f = factors
                        .get(s.factor as usize)
                        .ok_or_else(|| bad("no such factor"))?;
                    if s.elem as usize >= f.order {
                        return Err(bad("factor element out of range"));
                    }
                    push_syllable(factors, &mut out, s);
                }
                Key::FreeProduct(out)
            }
            _ => return Err(bad("key kind does not fit model")),
        };
        Ok(self.elem(key))
    }

    /// Default generators (not symmetrized).
    pub fn default_generators(&self) -> Vec<Element> {
        match &self.kind {
            ModelKind::Finite(t) => t
                .greedy_generators()
                .into_iter()
                .map(|g| self.elem(Key::Finite(g)))
                .collect(),
            ModelKind::FreeAbelian { rank } => (0..*rank)
                .map(|i| {
                    let mut v = vec![0; *rank];
                    v[i] = 1;
                    self.elem(Key::Abelian(v))
                })
                .collect(),
            ModelKind::Free { rank } => (1..=*rank as i32)
                .map(|l| self.elem(Key::Free(vec![l])))
                .collect(),
            ModelKind::FreeProduct { factors } => factors
                .iter()
                .enumerate()
                .flat_map(|(fi, f)| {
                    f.greedy_generators().into_iter().map(move |g| Syllable {
                        factor: fi as u32,
                        elem: g,
                    })
                })
                .map(|s| self.elem(Key::FreeProduct(vec![s])))
                .collect(),
        }
    }

    /// All elements of a finite model, in index order.
    pub fn all_elements(&self) -> Option<Vec<Element>> {
        match &self.kind {
            ModelKind::Finite(t) => Some(
                (0..t.order as u32)
                    .map(|g| self.elem(Key::Finite(g)))
                    .collect(),
            ),
            _ => None,
        }
    }

    /// Human-readable form of an element, parseable by [`GroupModel::parse_element`].
    pub fn format(&self, a: &Element) -> String {
        match (&self.kind, &a.key) {
            (_, Key::Finite(x)) => x.to_string(),
            (_, Key::Abelian(v)) => {
                let parts: Vec<String> = v.iter().map(i64::to_string).collect();
                format!("({})", parts.join(","))
            }
            (_, Key::Free(w)) if w.is_empty() => "1".into(),
            (_, Key::Free(w)) => w
                .iter()
                .map(|&l| {
                    let c = LETTERS[l.unsigned_abs() as usize - 1] as char;
                    if l > 0 {
                        c
                    } else {
                        c.to_ascii_uppercase()
                    }
                })
                .collect(),
            (_, Key::FreeProduct(w)) if w.is_empty() => "1".into(),
            (ModelKind::FreeProduct { .. }, Key::FreeProduct(w)) => w
                .iter()
                .map(|s| {
                    let c = LETTERS[s.factor as usize] as char;
                    if s.elem == 1 {
                        c.to_string()
                    } else {
                        format!("{c}{}", s.elem)
                    }
                })
                .collect(),
            _ => format!("{:?}", a.key),
        }
    }

    /// Parses a single element written as a word over the default generators.
    ///
    /// * finite: an element index, e.g. `3`
    /// * `z^n`: a vector `(2,-1)` or a word such as `e1`, `-e2`, `e1e2^-1`
    /// * `free:k`: letters, uppercase or a `^-1`/`⁻¹` suffix for inverses, `1` for identity
    /// * free products: syllables `a`, `b2`, ... (factor letter and element index)
    pub fn parse_element(&self, word: &str) -> Result<Element, GroupError> {
        let w = word.trim();
        let bad = |reason: &str| GroupError::BadWord {
            word: w.to_string(),
            model: self.description.clone(),
            reason: reason.to_string(),
        };
        match &self.kind {
            ModelKind::Finite(t) => {
                let x: u32 = w.parse().map_err(|_| bad("expected an element index"))?;
                if x as usize >= t.order {
                    return Err(bad("index out of range"));
                }
                Ok(self.elem(Key::Finite(x)))
            }
            ModelKind::FreeAbelian { rank } => {
                if let Some(body) = w.strip_prefix('(').and_then(|b| b.strip_suffix(')')) {
                    let v = body
                        .split(',')
                        .map(|p| p.trim().parse::<i64>())
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|_| bad("bad vector entry"))?;
                    if v.len() != *rank {
                        return Err(bad("wrong vector length"));
                    }
                    return Ok(self.elem(Key::Abelian(v)));
                }
                let mut acc = vec![0i64; *rank];
                for (token, sign) in tokenize(w, |c| c == 'e').map_err(|r| bad(&r))? {
                    let idx: usize = token[1..].parse().map_err(|_| bad("bad generator index"))?;
                    if idx == 0 || idx > *rank {
                        return Err(bad("generator index out of range"));
                    }
                    acc[idx - 1] += sign;
                }
                Ok(self.elem(Key::Abelian(acc)))
            }
            ModelKind::Free { rank } => {
                let mut letters = Vec::new();
                for (token, sign) in
                    tokenize(w, |c| c.is_ascii_alphabetic()).map_err(|r| bad(&r))?
                {
                    if token.len() != 1 {
                        return Err(bad("free generators are single letters"));
                    }
                    let c = token.chars().next().unwrap();
                    let g = (c.to_ascii_lowercase() as u8 - b'a') as usize;
                    if g >= *rank {
                        return Err(bad("letter out of range"));
                    }
                    let s = if c.is_ascii_uppercase() { -sign } else { sign };
                    letters.push(s as i32 * (g as i32 + 1));
                }
                self.canonical(Key::Free(letters))
            }
            ModelKind::FreeProduct { factors } => {
                let mut syllables = Vec::new();
                for (token, sign) in tokenize(w, |c| c.is_ascii_lowercase()).map_err(|r| bad(&r))? {
                    let fi = (token.as_bytes()[0] - b'a') as usize;
                    let f = factors.get(fi).ok_or_else(|| bad("no such factor"))?;
                    let e: u32 = if token.len() == 1 {
                        1
                    } else {
                        token[1..].parse().map_err(|_| bad("bad syllable index"))?
                    };
                    if e as usize >= f.order {
                        return Err(bad("syllable element out of range"));
                    }
                    let e = if sign < 0 { f.inv(e) } else { e };
                    syllables.push(Syllable {
                        factor: fi as u32,
                        elem: e,
                    });
                }
                self.canonical(Key::FreeProduct(syllables))
            }
        }
    }

    /// `generates` for finite models whose closure is the whole group;
    /// `generates-at-least-defaults` for infinite models when every default
    /// generator has word length at most `radius` over `gens`.
    pub fn generates_check(&self, gens: &GenSet, radius: usize) -> Generation {
        if let ModelKind::Finite(t) = &self.kind {
            let ids: Vec<u32> = gens
                .elements()
                .iter()
                .filter_map(|g| match g.key {
                    Key::Finite(x) => Some(x),
                    _ => None,
                })
                .collect();
            return if t.closure(&ids).len() == t.order {
                Generation::Generates
            } else {
                Generation::Unknown
            };
        }
        let mut seen: HashSet<Element> = HashSet::from([self.identity()]);
        let mut layer = vec![self.identity()];
        for _ in 0..radius {
            let mut next = Vec::new();
            for x in &layer {
                for s in gens.elements() {
                    let y = self.mul(x, s).expect("generator from another model");
                    if seen.insert(y.clone()) {
                        next.push(y);
                    }
                }
            }
            layer = next;
        }
        if self.default_generators().iter().all(|d| seen.contains(d)) {
            Generation::GeneratesAtLeastDefaults
        } else {
            Generation::Unknown
        }
    }
}

impl fmt::Display for GroupModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.description)
    }
}

fn push_free_letter(w: &mut Vec<i32>, l: i32) {
    if w.last() == Some(&-l) {
        w.pop();
    } else {
        w.push(l);
    }
}

fn push_syllable(factors: &[FiniteTable], w: &mut Vec<Syllable>, s: Syllable) {
    let f = &factors[s.factor as usize];
    if s.elem == f.identity {
        return;
    }
    match w.last_mut() {
        Some(last) if last.factor == s.factor => {
            let prod = f.mul(last.elem, s.elem);
            if prod == f.identity {
                w.pop();
            } else {
                last.elem = prod;
            }
        }
        _ => w.push(s),
    }
}

/// Splits a word into generator tokens with a sign each. A token starts with a
/// character accepted by `starts` and runs over the following ASCII digits.
/// `-` before a token and `^-1`, `⁻¹` or `'` after it invert it; `+` and `*`
/// separate tokens; a lone `1` is the identity.
fn tokenize(w: &str, starts: impl Fn(char) -> bool) -> Result<Vec<(String, i64)>, String> {
    let chars: Vec<char> = w.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut negate = false;
    if w == "1" || w.is_empty() {
        return Ok(out);
    }
    while i < chars.len() {
        let c = chars[i];
        if c == '+' || c == '*' || c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '-' {
            negate = !negate;
            i += 1;
            continue;
        }
        if !starts(c) {
            return Err(format!("unexpected character `{c}`"));
        }
        let mut token = c.to_string();
        i += 1;
        while i < chars.len() && chars[i].is_ascii_digit() {
            token.push(chars[i]);
            i += 1;
        }
        let mut sign = if negate { -1 } else { 1 };
        negate = false;
        loop {
            let rest: String = chars[i..].iter().collect();
            if rest.starts_with("^-1") {
                sign = -sign;
                i += 3;
            } else if rest.starts_with("⁻¹") {
                sign = -sign;
                i += 2;
            } else if rest.starts_with('\'') {
                sign = -sign;
                i += 1;
            } else {
                break;
            }
        }
        out.push((token, sign));
    }
    if negate {
        return Err("dangling `-`".into());
    }
    Ok(out)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum TableFile {
    Bare(Vec<Vec<u32>>),
    Wrapped { table: Vec<Vec<u32>> },
}

/// Reads a JSON multiplication table, either a bare `n × n` array or `{"table": ...}`.
pub fn read_table_file(path: &Path) -> Result<FiniteTable, GroupError> {
    let text = std::fs::read_to_string(path).map_err(|source| GroupError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let parsed: TableFile = serde_json::from_str(&text)
        .map_err(|e| GroupError::InvalidTable(format!("{}: {e}", path.display())))?;
    let rows = match parsed {
        TableFile::Bare(r) | TableFile::Wrapped { table: r } => r,
    };
    FiniteTable::from_rows(&rows)
}

fn parse_finite_spec(spec: &str) -> Result<(FiniteTable, String), GroupError> {
    if let Some(n) = spec.strip_prefix("cyclic:") {
        let n = n
            .parse()
            .map_err(|_| GroupError::BadSpec(spec.to_string()))?;
        return Ok((FiniteTable::cyclic(n)?, spec.to_string()));
    }
    if let Some(path) = spec.strip_prefix("table:") {
        return Ok((read_table_file(Path::new(path))?, spec.to_string()));
    }
    Err(GroupError::BadSpec(spec.to_string()))
}

/// A symmetric generating set without the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenSet {
    elements: Vec<Element>,
    source_words: Vec<String>,
}

impl GenSet {
    /// Symmetrizes `elements`, drops the identity, sorts by key and deduplicates.
    pub fn new(
        model: &GroupModel,
        elements: impl IntoIterator<Item = Element>,
        source_words: Vec<String>,
    ) -> Result<Self, GroupError> {
        let mut set = BTreeSet::new();
        for e in elements {
            let inv = model.inv(&e)?;
            set.insert(e);
            set.insert(inv);
        }
        set.remove(&model.identity());
        Ok(GenSet {
            elements: set.into_iter().collect(),
            source_words,
        })
    }

    pub fn defaults(model: &GroupModel) -> Self {
        let elems = model.default_generators();
        let words = elems.iter().map(|e| model.format(e)).collect();
        Self::new(model, elems, words).expect("defaults belong to their model")
    }

    /// All non-identity elements of a finite model.
    pub fn all(model: &GroupModel) -> Result<Self, GroupError> {
        let elems = model.all_elements().ok_or(GroupError::AllRequiresFinite)?;
        Self::new(model, elems, vec!["all".into()])
    }

    /// Parses a comma-separated generator list; `all` selects every non-identity
    /// element of a finite group. Vector literals such as `(1,-1)` may contain commas.
    pub fn parse(model: &GroupModel, list: &str) -> Result<Self, GroupError> {
        let list = list.trim();
        if list == "all" {
            return Self::all(model);
        }
        let words = split_top_level(list);
        let elems = words
            .iter()
            .map(|w| model.parse_element(w))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(model, elems, words)
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn source_words(&self) -> &[String] {
        &self.source_words
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, e: &Element) -> bool {
        self.elements.binary_search(e).is_ok()
    }
}

fn split_top_level(list: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in list.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(std::mem::take(&mut cur).trim().to_string());
                continue;
            }
            _ => {}
        }
        cur.push(c);
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

/// The symmetrized set `(S ∪ S² ∪ … ∪ S^k) \ {e}`.
pub fn power_union(model: &GroupModel, gens: &GenSet, k: usize) -> Result<GenSet, GroupError> {
    if k == 0 {
        return Err(GroupError::ZeroPower);
    }
    let mut all: BTreeSet<Element> = gens.elements.iter().cloned().collect();
    let mut layer: BTreeSet<Element> = all.clone();
    for _ in 1..k {
        let mut next = BTreeSet::new();
        for x in &layer {
            for s in &gens.elements {
                next.insert(model.mul(x, s)?);
            }
        }
        all.extend(next.iter().cloned());
        layer = next;
    }
    let words = vec![format!("({})^≤{k}", gens.source_words.join(","))];
    GenSet::new(model, all, words)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z5() -> GroupModel {
        GroupModel::cyclic(5).unwrap()
    }

    #[test]
    fn cyclic_arithmetic() {
        let g = z5();
        let a = g.parse_element("3").unwrap();
        let b = g.parse_element("4").unwrap();
        assert_eq!(g.format(&g.mul(&a, &b).unwrap()), "2");
        assert_eq!(
            g.format(&g.inv(&g.parse_element("2").unwrap()).unwrap()),
            "3"
        );
    }

    #[test]
    fn free_reduction_and_inverse() {
        let f = GroupModel::free(2).unwrap();
        let a = f.parse_element("a").unwrap();
        let a_inv = f.parse_element("a^-1").unwrap();
        assert!(f.is_identity(&f.mul(&a, &a_inv).unwrap()));
        let ab = f.parse_element("ab").unwrap();
        assert_eq!(f.format(&f.inv(&ab).unwrap()), "BA");
        assert_eq!(f.parse_element("b⁻¹a⁻¹").unwrap(), f.inv(&ab).unwrap());
        assert_eq!(f.format(&f.parse_element("abBA").unwrap()), "1");
    }

    #[test]
    fn free_abelian_inverse() {
        let z2 = GroupModel::free_abelian(2).unwrap();
        let v = z2.parse_element("(1,-2)").unwrap();
        assert_eq!(z2.format(&z2.inv(&v).unwrap()), "(-1,2)");
        assert_eq!(z2.parse_element("e1-e2-e2").unwrap(), v);
    }

    #[test]
    fn infinite_dihedral_cancellation() {
        let d = GroupModel::from_spec("freeprod:cyclic:2,cyclic:2").unwrap();
        let ab = d.parse_element("ab").unwrap();
        let ba = d.parse_element("ba").unwrap();
        assert!(d.is_identity(&d.mul(&ab, &ba).unwrap()));
        assert_eq!(d.format(&d.mul(&ab, &ab).unwrap()), "abab");
    }

    #[test]
    fn free_product_merges_within_factor() {
        let g = GroupModel::from_spec("freeprod:cyclic:3,cyclic:2").unwrap();
        let a = g.parse_element("a").unwrap();
        let aa = g.mul(&a, &a).unwrap();
        assert_eq!(g.format(&aa), "a2");
        assert!(g.is_identity(&g.mul(&aa, &a).unwrap()));
        let w = g.parse_element("aba2").unwrap();
        assert_eq!(g.format(&g.inv(&w).unwrap()), "aba2");
    }

    #[test]
    fn model_mismatch_is_reported() {
        let a = GroupModel::free(2).unwrap();
        let b = GroupModel::free(3).unwrap();
        let x = a.parse_element("a").unwrap();
        let y = b.parse_element("a").unwrap();
        assert!(matches!(
            a.mul(&x, &y),
            Err(GroupError::ModelMismatch { .. })
        ));
        assert!(matches!(b.inv(&x), Err(GroupError::ModelMismatch { .. })));
    }

    #[test]
    fn genset_symmetrized_and_identity_free() {
        let g = z5();
        let s = GenSet::parse(&g, "0,1").unwrap();
        let shown: Vec<String> = s.elements().iter().map(|e| g.format(e)).collect();
        assert_eq!(shown, ["1", "4"]);
        assert_eq!(GenSet::all(&g).unwrap().len(), 4);
        let z2 = GroupModel::free_abelian(2).unwrap();
        assert_eq!(GenSet::parse(&z2, "(1,1),e2").unwrap().len(), 4);
    }

    #[test]
    fn power_union_examples() {
        let z2 = GroupModel::free_abelian(2).unwrap();
        let s = GenSet::defaults(&z2);
        assert_eq!(power_union(&z2, &s, 1).unwrap().elements(), s.elements());
        // Oracle: every word of length <= 3 over S, deduplicated.
        let mut expect = BTreeSet::new();
        let steps = [(1, 0), (-1, 0), (0, 1), (0, -1)];
        for len in 1..=3 {
            let mut stack = vec![(0i64, 0i64, 0)];
            while let Some((x, y, l)) = stack.pop() {
                if l == len {
                    if (x, y) != (0, 0) {
                        expect.insert((x, y));
                    }
                    continue;
                }
                for (dx, dy) in steps {
                    stack.push((x + dx, y + dy, l + 1));
                }
            }
        }
        assert_eq!(expect.len(), 24);
        let t = power_union(&z2, &s, 3).unwrap();
        let got: BTreeSet<(i64, i64)> = t
            .elements()
            .iter()
            .map(|e| match e.key() {
                Key::Abelian(v) => (v[0], v[1]),
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(got, expect);

        let g = z5();
        let s = GenSet::parse(&g, "1").unwrap();
        assert_eq!(power_union(&g, &s, 2).unwrap().len(), 4);
        assert!(matches!(power_union(&g, &s, 0), Err(GroupError::ZeroPower)));
    }

    #[test]
    fn generates_check_examples() {
        let g = z5();
        assert_eq!(
            g.generates_check(&GenSet::parse(&g, "2").unwrap(), 1),
            Generation::Generates
        );
        let z2 = GroupModel::free_abelian(2).unwrap();
        assert_eq!(
            z2.generates_check(&GenSet::parse(&z2, "e1").unwrap(), 5),
            Generation::Unknown
        );
        let f2 = GroupModel::free(2).unwrap();
        assert_eq!(
            f2.generates_check(&GenSet::defaults(&f2), 1),
            Generation::GeneratesAtLeastDefaults
        );
    }

    #[test]
    fn table_validation() {
        let bad = vec![vec![0, 1], vec![0, 1]];
        assert!(FiniteTable::from_rows(&bad).is_err());
        // Klein four-group with identity at index 2.
        let v4 = vec![
            vec![2, 3, 0, 1],
            vec![3, 2, 1, 0],
            vec![0, 1, 2, 3],
            vec![1, 0, 3, 2],
        ];
        let t = FiniteTable::from_rows(&v4).unwrap();
        assert_eq!(t.identity(), 2);
        assert_eq!(t.greedy_generators().len(), 2);
    }

    #[test]
    fn spec_parsing() {
        for s in [
            "cyclic:7",
            "z^3",
            "z",
            "free:2",
            "freeprod:cyclic:2,cyclic:2,cyclic:2",
        ] {
            GroupModel::from_spec(s).unwrap();
        }
        for s in ["cyclic:", "z^x", "free:0", "nonsense"] {
            assert!(GroupModel::from_spec(s).is_err(), "{s}");
        }
    }
}
