//! Triple corpora: ingestion, vocabularies, splitting and statistics.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::seed;

/// One observed (query, user, item) triple, in dense index space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interaction {
    pub query: usize,
    pub user: usize,
    pub item: usize,
}

impl Interaction {
    pub fn new(query: usize, user: usize, item: usize) -> Self {
        Interaction { query, user, item }
    }
}

/// Bidirectional map between raw labels and dense indices,
/// assigned in first-appearance order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    /// `prefix0`, `prefix1`, ... for synthetic corpora.
    pub fn synthetic(prefix: &str, len: usize) -> Self {
        let mut vocab = Vocabulary::new();
        for i in 0..len {
            vocab.intern(&format!("{prefix}{i}"));
        }
        vocab
    }

    pub fn intern(&mut self, label: &str) -> usize {
        if let Some(&id) = self.index.get(label) {
            return id;
        }
        let id = self.labels.len();
        self.labels.push(label.to_owned());
        self.index.insert(label.to_owned(), id);
        id
    }

    pub fn get(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn label(&self, id: usize) -> Option<&str> {
        self.labels.get(id).map(String::as_str)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabularies {
    pub queries: Vocabulary,
    pub users: Vocabulary,
    pub items: Vocabulary,
}

/// Column positions of query, user and item in a three-column log.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TripleSchema {
    pub query: usize,
    pub user: usize,
    pub item: usize,
}

impl Default for TripleSchema {
    fn default() -> Self {
        TripleSchema {
            query: 0,
            user: 1,
            item: 2,
        }
    }
}

impl FromStr for TripleSchema {
    type Err = Error;

    /// Parses a column order such as `query,user,item` or `user,item,query`.
    fn from_str(s: &str) -> Result<Self> {
        let cols: Vec<&str> = s.split(',').map(str::trim).collect();
        let find = |name: &str| {
            cols.iter()
                .position(|c| c.eq_ignore_ascii_case(name))
                .ok_or_else(|| Error::invalid(format!("schema `{s}` lacks column `{name}`")))
        };
        if cols.len() != 3 {
            return Err(Error::invalid(format!("schema `{s}` must name three columns")));
        }
        Ok(TripleSchema {
            query: find("query")?,
            user: find("user")?,
            item: find("item")?,
        })
    }
}

/// Mutable staging area that assigns indices and collapses duplicates.
#[derive(Debug, Default)]
pub struct CorpusBuilder {
    vocab: Vocabularies,
    seen: HashSet<Interaction>,
    interactions: Vec<Interaction>,
}

impl CorpusBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns `false` when the triple was already present.
    pub fn push(&mut self, query: &str, user: &str, item: &str) -> bool {
        let triple = Interaction {
            query: self.vocab.queries.intern(query),
            user: self.vocab.users.intern(user),
            item: self.vocab.items.intern(item),
        };
        if self.seen.insert(triple) {
            self.interactions.push(triple);
            true
        } else {
            false
        }
    }

    pub fn len(&self) -> usize {
        self.interactions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.interactions.is_empty()
    }

    pub fn build(self) -> Corpus {
        Corpus::assemble(Arc::new(self.vocab), self.interactions)
    }
}

/// An immutable, indexed set of unique triples over shared vocabularies.
#[derive(Debug, Clone)]
pub struct Corpus {
    interactions: Vec<Interaction>,
    vocab: Arc<Vocabularies>,
    positives: HashMap<(usize, usize), HashSet<usize>>,
}

impl PartialEq for Corpus {
    fn eq(&self, other: &Self) -> bool {
        self.interactions == other.interactions && self.vocab == other.vocab
    }
}

pub(crate) fn positive_index(
    interactions: &[Interaction],
) -> HashMap<(usize, usize), HashSet<usize>> {
    let mut index: HashMap<(usize, usize), HashSet<usize>> = HashMap::new();
    for t in interactions {
        index.entry((t.user, t.query)).or_default().insert(t.item);
    }
    index
}

impl Corpus {
    fn assemble(vocab: Arc<Vocabularies>, interactions: Vec<Interaction>) -> Corpus {
        let positives = positive_index(&interactions);
        Corpus {
            interactions,
            vocab,
            positives,
        }
    }

    /// Builds a corpus from dense-index triples over the given vocabularies.
    /// Duplicates are collapsed, keeping the first occurrence.
    pub fn from_interactions(
        vocab: Arc<Vocabularies>,
        triples: impl IntoIterator<Item = Interaction>,
    ) -> Result<Corpus> {
        let mut seen = HashSet::new();
        let mut interactions = Vec::new();
        for t in triples {
            check_index("query", t.query, vocab.queries.len())?;
            check_index("user", t.user, vocab.users.len())?;
            check_index("item", t.item, vocab.items.len())?;
            if seen.insert(t) {
                interactions.push(t);
            }
        }
        Ok(Corpus::assemble(vocab, interactions))
    }

    /// Corpus over synthetic vocabularies `q*`, `u*`, `i*` of the given sizes.
    pub fn from_index_triples(
        n_queries: usize,
        n_users: usize,
        n_items: usize,
        triples: impl IntoIterator<Item = Interaction>,
    ) -> Result<Corpus> {
        let vocab = Vocabularies {
            queries: Vocabulary::synthetic("q", n_queries),
            users: Vocabulary::synthetic("u", n_users),
            items: Vocabulary::synthetic("i", n_items),
        };
        Corpus::from_interactions(Arc::new(vocab), triples)
    }

    /// A corpus with the same vocabularies as `self` but different triples.
    pub fn with_interactions(&self, interactions: Vec<Interaction>) -> Corpus {
        Corpus::assemble(Arc::clone(&self.vocab), interactions)
    }

    pub fn interactions(&self) -> &[Interaction] {
        &self.interactions
    }

    pub fn vocab(&self) -> &Vocabularies {
        &self.vocab
    }

    pub fn shared_vocab(&self) -> Arc<Vocabularies> {
        Arc::clone(&self.vocab)
    }

    pub fn len(&self) -> usize {
        self.interactions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.interactions.is_empty()
    }

    pub fn n_queries(&self) -> usize {
        self.vocab.queries.len()
    }

    pub fn n_users(&self) -> usize {
        self.vocab.users.len()
    }

    pub fn n_items(&self) -> usize {
        self.vocab.items.len()
    }

    /// Items observed for the (user, query) pair.
    pub fn positives(&self, user: usize, query: usize) -> Option<&HashSet<usize>> {
        self.positives.get(&(user, query))
    }

    pub fn is_positive(&self, user: usize, query: usize, item: usize) -> bool {
        self.positives
            .get(&(user, query))
            .is_some_and(|set| set.contains(&item))
    }

    pub fn positives_by_user_query(&self) -> &HashMap<(usize, usize), HashSet<usize>> {
        &self.positives
    }

    /// True when `other` uses the same index spaces.
    pub fn same_shape(&self, other: &Corpus) -> bool {
        self.n_queries() == other.n_queries()
            && self.n_users() == other.n_users()
            && self.n_items() == other.n_items()
    }

    pub fn stats(&self) -> CorpusStats {
        CorpusStats {
            queries: self.n_queries(),
            users: self.n_users(),
            items: self.n_items(),
            samples: self.len(),
            sparsity: sparsity(self).ok(),
        }
    }

    /// The first `floor(fraction * len)` triples of a seeded shuffle.
    /// Nested for increasing fractions under one seed.
    pub fn subsample(&self, fraction: f64, seed_value: u64) -> Result<Corpus> {
        if !(fraction > 0.0 && fraction <= 1.0) {
            return Err(Error::invalid(format!("subsample fraction {fraction} not in (0, 1]")));
        }
        let mut triples = self.interactions.clone();
        triples.shuffle(&mut seed::rng(seed_value));
        let keep = floor_part(fraction, triples.len());
        if keep == 0 {
            return Err(Error::DegenerateSplit {
                part: "subsample",
                len: self.len(),
                fraction,
            });
        }
        triples.truncate(keep);
        Ok(self.with_interactions(triples))
    }
}

fn check_index(what: &'static str, index: usize, size: usize) -> Result<()> {
    if index >= size {
        return Err(Error::IndexOutOfRange { what, index, size });
    }
    Ok(())
}

/// Counts and density, printed as `key=value` lines.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusStats {
    pub queries: usize,
    pub users: usize,
    pub items: usize,
    pub samples: usize,
    pub sparsity: Option<f64>,
}

impl fmt::Display for CorpusStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "queries={}", self.queries)?;
        writeln!(f, "users={}", self.users)?;
        writeln!(f, "items={}", self.items)?;
        writeln!(f, "samples={}", self.samples)?;
        match self.sparsity {
            Some(s) => write!(f, "sparsity={:.6} ({:.2}%)", s, 100.0 * s),
            None => write!(f, "sparsity=undefined"),
        }
    }
}

/// `1 - samples / (|Q| * |U| * |A|)`.
pub fn sparsity(corpus: &Corpus) -> Result<f64> {
    let (nq, nu, ni) = (corpus.n_queries(), corpus.n_users(), corpus.n_items());
    if nq == 0 || nu == 0 || ni == 0 {
        return Err(Error::UndefinedDensity {
            n_queries: nq,
            n_users: nu,
            n_items: ni,
        });
    }
    let cells = nq as f64 * nu as f64 * ni as f64;
    Ok(1.0 - corpus.len() as f64 / cells)
}

/// Train/validation/test proportions plus the shuffle seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub validation_fraction: f64,
    pub test_fraction: f64,
    pub seed: u64,
}

impl SplitSpec {
    pub fn new(train: f64, validation: f64, test: f64, seed: u64) -> Result<Self> {
        let spec = SplitSpec {
            train_fraction: train,
            validation_fraction: validation,
            test_fraction: test,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let fractions = [
            self.train_fraction,
            self.validation_fraction,
            self.test_fraction,
        ];
        if fractions.iter().any(|f| !(*f > 0.0 && *f < 1.0)) {
            return Err(Error::invalid(format!(
                "split fractions {fractions:?} must each lie in (0, 1)"
            )));
        }
        let sum: f64 = fractions.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!("split fractions sum to {sum}, not 1")));
        }
        Ok(())
    }

    /// Part sizes for `len` triples: validation and test are floored,
    /// train takes the remainder.
    pub fn part_sizes(&self, len: usize) -> (usize, usize, usize) {
        let validation = floor_part(self.validation_fraction, len);
        let test = floor_part(self.test_fraction, len);
        (len - validation - test, validation, test)
    }
}

// Absorbs representation error such as 0.3 * 10 = 2.9999999999999996.
fn floor_part(fraction: f64, len: usize) -> usize {
    ((fraction * len as f64) + 1e-9).floor() as usize
}

/// Partitions triples by a seeded uniform shuffle. All parts share the
/// parent's vocabularies.
pub fn split(corpus: &Corpus, spec: &SplitSpec) -> Result<(Corpus, Corpus, Corpus)> {
    spec.validate()?;
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus("split input".into()));
    }
    let (n_train, n_validation, n_test) = spec.part_sizes(corpus.len());
    for (part, len, fraction) in [
        ("train", n_train, spec.train_fraction),
        ("validation", n_validation, spec.validation_fraction),
        ("test", n_test, spec.test_fraction),
    ] {
        if len == 0 {
            return Err(Error::DegenerateSplit {
                part,
                len: corpus.len(),
                fraction,
            });
        }
    }
    let mut triples = corpus.interactions.clone();
    triples.shuffle(&mut seed::rng(spec.seed));
    let test = triples.split_off(n_train + n_validation);
    let validation = triples.split_off(n_train);
    Ok((
        corpus.with_interactions(triples),
        corpus.with_interactions(validation),
        corpus.with_interactions(test),
    ))
}

struct Row {
    line: usize,
    fields: Vec<String>,
}

fn split_fields(line: &str) -> Vec<String> {
    if line.contains('\t') {
        line.split('\t').map(|f| f.trim().to_owned()).collect()
    } else {
        line.split_whitespace().map(str::to_owned).collect()
    }
}

// A first line is a header when it starts with `#`, or when a column that
// is integral on the second line is not integral on the first.
fn looks_like_header(first: &[String], second: Option<&[String]>) -> bool {
    if first.first().is_some_and(|f| f.starts_with('#')) {
        return true;
    }
    let Some(second) = second else {
        return false;
    };
    first
        .iter()
        .zip(second)
        .any(|(a, b)| b.parse::<i64>().is_ok() && a.parse::<i64>().is_err())
}

/// Reads tab-separated rows, checking arity. `exact` demands exactly
/// `arity` fields, otherwise at least `arity`.
fn read_rows(path: &Path, arity: usize, exact: bool) -> Result<Vec<Row>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut rows: Vec<Row> = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| Row {
            line: i + 1,
            fields: split_fields(l),
        })
        .collect();
    if let Some(first) = rows.first() {
        let second = rows.get(1).map(|r| r.fields.as_slice());
        if looks_like_header(&first.fields, second) {
            rows.remove(0);
        }
    }
    for row in &rows {
        let n = row.fields.len();
        let bad_arity = if exact { n != arity } else { n < arity };
        if bad_arity {
            return Err(Error::Parse {
                path: path.to_owned(),
                line: row.line,
                message: format!("expected {arity} fields, found {n}"),
            });
        }
        if let Some(pos) = row.fields[..arity].iter().position(String::is_empty) {
            return Err(Error::Parse {
                path: path.to_owned(),
                line: row.line,
                message: format!("field {} is empty", pos + 1),
            });
        }
    }
    Ok(rows)
}

/// Reads a three-column triple log.
pub fn ingest_tsv(path: &Path, schema: TripleSchema) -> Result<Corpus> {
    let rows = read_rows(path, 3, true)?;
    let mut builder = CorpusBuilder::new();
    for row in &rows {
        let f = &row.fields;
        builder.push(&f[schema.query], &f[schema.user], &f[schema.item]);
    }
    if builder.is_empty() {
        return Err(Error::EmptyCorpus(path.display().to_string()));
    }
    Ok(builder.build())
}

/// The `k` most used labels; ties broken by label order.
fn top_labels(counts: &HashMap<&str, usize>, k: usize) -> HashSet<String> {
    let mut ranked: Vec<(&str, usize)> = counts.iter().map(|(l, c)| (*l, *c)).collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    ranked.into_iter().take(k).map(|(l, _)| l.to_owned()).collect()
}

/// Builds (tag, user, artist) triples from hetrec-style Last.fm logs.
///
/// `tag_log` rows are `(user, artist, tag, ...)`, `listen_log` rows are
/// `(user, artist, ...)`. Only the `top_k_tags` most used tags are kept.
/// A listened pair whose user applied retained tags yields one triple per
/// such tag; an untagged listened pair inherits every retained tag other
/// users gave the artist; a pair whose artist carries no retained tag at all
/// is dropped.
pub fn ingest_lastfm(tag_log: &Path, listen_log: &Path, top_k_tags: usize) -> Result<Corpus> {
    if top_k_tags < 1 {
        return Err(Error::invalid("top_k_tags must be at least 1"));
    }
    let tag_rows = read_rows(tag_log, 3, false)?;
    let listen_rows = read_rows(listen_log, 2, false)?;

    let mut assignments: BTreeSet<(&str, &str, &str)> = BTreeSet::new();
    for row in &tag_rows {
        let f = &row.fields;
        assignments.insert((f[0].as_str(), f[1].as_str(), f[2].as_str()));
    }
    let mut usage: HashMap<&str, usize> = HashMap::new();
    for (_, _, tag) in &assignments {
        *usage.entry(tag).or_default() += 1;
    }
    let retained = top_labels(&usage, top_k_tags);

    // BTreeSet values keep emitted tags in label order.
    let mut own: HashMap<(&str, &str), BTreeSet<&str>> = HashMap::new();
    let mut by_artist: HashMap<&str, BTreeSet<&str>> = HashMap::new();
    for &(user, artist, tag) in &assignments {
        if retained.contains(tag) {
            own.entry((user, artist)).or_default().insert(tag);
            by_artist.entry(artist).or_default().insert(tag);
        }
    }

    let mut builder = CorpusBuilder::new();
    let mut listened = HashSet::new();
    for row in &listen_rows {
        let (user, artist) = (row.fields[0].as_str(), row.fields[1].as_str());
        if !listened.insert((user, artist)) {
            continue;
        }
        let tags = own.get(&(user, artist)).or_else(|| by_artist.get(artist));
        for tag in tags.into_iter().flatten() {
            builder.push(tag, user, artist);
        }
    }
    if builder.is_empty() {
        return Err(Error::EmptyCorpus(listen_log.display().to_string()));
    }
    Ok(builder.build())
}

/// Builds (category, user, business) triples from review and category logs,
/// keeping users with at least `min_reviews` reviews.
pub fn ingest_yelp(review_log: &Path, category_map: &Path, min_reviews: usize) -> Result<Corpus> {
    if min_reviews < 1 {
        return Err(Error::invalid("min_reviews must be at least 1"));
    }
    let reviews = read_rows(review_log, 2, false)?;
    let categories = read_rows(category_map, 2, false)?;

    let mut business_categories: HashMap<&str, Vec<&str>> = HashMap::new();
    for row in &categories {
        let entry = business_categories.entry(row.fields[0].as_str()).or_default();
        let category = row.fields[1].as_str();
        if !entry.contains(&category) {
            entry.push(category);
        }
    }
    let mut review_counts: HashMap<&str, usize> = HashMap::new();
    for row in &reviews {
        *review_counts.entry(row.fields[0].as_str()).or_default() += 1;
    }

    let mut builder = CorpusBuilder::new();
    for row in &reviews {
        let (user, business) = (row.fields[0].as_str(), row.fields[1].as_str());
        if review_counts[user] < min_reviews {
            continue;
        }
        for category in business_categories.get(business).into_iter().flatten() {
            builder.push(category, user, business);
        }
    }
    if builder.is_empty() {
        return Err(Error::EmptyCorpus(review_log.display().to_string()));
    }
    Ok(builder.build())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_tmp(dir: &tempfile::TempDir, name: &str, body: &str) -> std::path::PathBuf {
        let path = dir.path().join(name);
        let mut f = fs::File::create(&path).unwrap();
        f.write_all(body.as_bytes()).unwrap();
        path
    }

    #[test]
    fn tsv_duplicates_collapse() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_tmp(&dir, "t.tsv", "rock\tu1\ta1\nrock\tu1\ta1\npop\tu1\ta2\n");
        let corpus = ingest_tsv(&path, TripleSchema::default()).unwrap();
        assert_eq!(corpus.len(), 2);
        assert_eq!((corpus.n_queries(), corpus.n_users(), corpus.n_items()), (2, 1, 2));
        assert_eq!(corpus.vocab().queries.get("pop"), Some(1));
    }

    #[test]
    fn tsv_bad_arity_names_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_tmp(&dir, "t.tsv", "rock\tu1\ta1\npop\tu1\n");
        let err = ingest_tsv(&path, TripleSchema::default()).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn tsv_empty_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_tmp(&dir, "t.tsv", "");
        assert!(matches!(
            ingest_tsv(&path, TripleSchema::default()),
            Err(Error::EmptyCorpus(_))
        ));
    }

    #[test]
    fn tsv_schema_reorders_and_skips_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_tmp(&dir, "t.tsv", "userID\titemID\ttagID\n1\t10\t7\n2\t10\t7\n");
        let schema: TripleSchema = "user,item,query".parse().unwrap();
        let corpus = ingest_tsv(&path, schema).unwrap();
        assert_eq!(corpus.len(), 2);
        assert_eq!(corpus.vocab().queries.labels(), &["7".to_string()]);
        assert_eq!(corpus.n_users(), 2);
    }

    #[test]
    fn schema_parse_errors() {
        assert!("query,user".parse::<TripleSchema>().is_err());
        assert!("query,user,thing".parse::<TripleSchema>().is_err());
    }

    #[test]
    fn lastfm_rules() {
        let dir = tempfile::tempdir().unwrap();
        // u1 tags a1 rock+indie; u2 tags a2 pop; u9 tags a3 with a rare tag.
        let tags = write_tmp(
            &dir,
            "tags.dat",
            "userID\tartistID\ttagID\n\
             u1\ta1\trock\nu1\ta1\tindie\nu2\ta2\tpop\nu3\ta2\tpop\nu3\ta4\trock\n\
             u3\ta4\tindie\nu9\ta3\trare\n",
        );
        let listens = write_tmp(
            &dir,
            "listens.dat",
            "userID\tartistID\tweight\nu1\ta1\t5\nu1\ta2\t3\nu1\ta3\t1\n",
        );
        let corpus = ingest_lastfm(&tags, &listens, 3).unwrap();
        let label = |t: &Interaction| {
            (
                corpus.vocab().queries.label(t.query).unwrap().to_owned(),
                corpus.vocab().items.label(t.item).unwrap().to_owned(),
            )
        };
        let got: BTreeSet<(String, String)> = corpus.interactions().iter().map(label).collect();
        let want: BTreeSet<(String, String)> = [("indie", "a1"), ("rock", "a1"), ("pop", "a2")]
            .iter()
            .map(|(t, a)| (t.to_string(), a.to_string()))
            .collect();
        assert_eq!(got, want);
        assert!(corpus.vocab().queries.get("rare").is_none());
    }

    #[test]
    fn lastfm_top_k_tie_break_is_lexicographic() {
        let mut counts = HashMap::new();
        counts.insert("b", 2);
        counts.insert("a", 2);
        counts.insert("c", 3);
        let top = top_labels(&counts, 2);
        assert!(top.contains("c") && top.contains("a"));
    }

    #[test]
    fn lastfm_rejects_zero_tags() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_tmp(&dir, "x", "u\ta\tt\n");
        assert!(ingest_lastfm(&p, &p, 0).is_err());
    }

    #[test]
    fn yelp_filters_light_users() {
        let dir = tempfile::tempdir().unwrap();
        let reviews = write_tmp(
            &dir,
            "reviews.tsv",
            "light\tb1\nlight\tb2\nlight\tb3\nheavy\tb1\nheavy\tb2\nheavy\tb3\nheavy\tb4\n",
        );
        let cats = write_tmp(
            &dir,
            "cats.tsv",
            "b1\tRestaurants\nb1\tMexican\nb2\tBars\nb3\tBars\nb4\tCafes\nb9\tNobody\n",
        );
        let corpus = ingest_yelp(&reviews, &cats, 4).unwrap();
        assert!(corpus.vocab().users.get("light").is_none());
        assert_eq!(corpus.len(), 5);
        let b1 = corpus.vocab().items.get("b1").unwrap();
        let b1_triples = corpus.interactions().iter().filter(|t| t.item == b1).count();
        assert_eq!(b1_triples, 2);
        assert!(corpus.vocab().items.get("b9").is_none());
    }

    #[test]
    fn yelp_pass_through() {
        let dir = tempfile::tempdir().unwrap();
        let reviews = write_tmp(&dir, "r", "u1\tb1\nu2\tb1\n");
        let cats = write_tmp(&dir, "c", "b1\tFood\n");
        assert_eq!(ingest_yelp(&reviews, &cats, 1).unwrap().len(), 2);
        assert!(ingest_yelp(&reviews, &cats, 0).is_err());
    }

    fn line_corpus(n: usize) -> Corpus {
        Corpus::from_index_triples(1, 1, n, (0..n).map(|i| Interaction::new(0, 0, i))).unwrap()
    }

    #[test]
    fn split_exact_proportions_and_determinism() {
        let corpus = line_corpus(10);
        let spec = SplitSpec::new(0.8, 0.1, 0.1, 42).unwrap();
        let (tr, va, te) = split(&corpus, &spec).unwrap();
        assert_eq!((tr.len(), va.len(), te.len()), (8, 1, 1));
        let (tr2, va2, te2) = split(&corpus, &spec).unwrap();
        assert_eq!(tr.interactions(), tr2.interactions());
        assert_eq!(va.interactions(), va2.interactions());
        assert_eq!(te.interactions(), te2.interactions());
        assert!(Arc::ptr_eq(&tr.vocab, &te.vocab));
    }

    #[test]
    fn split_sizes_follow_rounding_rule() {
        let spec = SplitSpec::new(0.8, 0.1, 0.1, 0).unwrap();
        // 574521 * 0.1 = 57452.1 → 57452 each, remainder to train.
        assert_eq!(spec.part_sizes(574_521), (459_617, 57_452, 57_452));
        let spec = SplitSpec::new(0.4, 0.3, 0.3, 0).unwrap();
        assert_eq!(spec.part_sizes(10), (4, 3, 3));
    }

    #[test]
    fn split_degenerate() {
        let spec = SplitSpec::new(0.8, 0.1, 0.1, 0).unwrap();
        assert!(matches!(
            split(&line_corpus(5), &spec),
            Err(Error::DegenerateSplit { .. })
        ));
        assert!(SplitSpec::new(0.8, 0.1, 0.2, 0).is_err());
        assert!(SplitSpec::new(1.0, 0.0, 0.0, 0).is_err());
    }

    #[test]
    fn sparsity_cases() {
        let one = line_corpus(1);
        assert_eq!(sparsity(&one).unwrap(), 0.0);
        let empty = Corpus::from_index_triples(0, 1, 1, []).unwrap();
        assert!(matches!(sparsity(&empty), Err(Error::UndefinedDensity { .. })));
    }

    #[test]
    fn subsample_is_nested() {
        let corpus = line_corpus(20);
        let half = corpus.subsample(0.5, 3).unwrap();
        let most = corpus.subsample(0.8, 3).unwrap();
        assert_eq!(half.len(), 10);
        assert_eq!(&most.interactions()[..10], half.interactions());
    }

    #[test]
    fn out_of_range_triple_rejected() {
        assert!(matches!(
            Corpus::from_index_triples(1, 1, 1, [Interaction::new(0, 0, 1)]),
            Err(Error::IndexOutOfRange { what: "item", .. })
        ));
    }
}
