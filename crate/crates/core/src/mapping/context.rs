use percent_encoding::{percent_decode_str, utf8_percent_encode, AsciiSet, NON_ALPHANUMERIC};

use crate::rdf::{Iri, TermError, Vocabulary};

pub const DEFAULT_BASE_IRI: &str = "https://example.org/meds-data/";

/// Everything outside the URI unreserved set (`ALPHA / DIGIT / - . _ ~`).
const KEY: &AsciiSet = &NON_ALPHANUMERIC.remove(b'-').remove(b'.').remove(b'_').remove(b'~');

pub(crate) fn encode_key(key: &str) -> String {
    utf8_percent_encode(key, KEY).to_string()
}

pub(crate) fn decode_key(segment: &str) -> Option<String> {
    percent_decode_str(segment).decode_utf8().ok().map(|s| s.into_owned())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Strictness {
    /// Stop at the first malformed record.
    #[default]
    FailFast,
    /// Map every record best-effort and report all problems.
    Collect,
}

/// Conversion settings. The same context and input always yield the same graph.
///
/// Node IRIs:
///
/// ```text
/// {base}subject/{id}                     {base}code/{code}
/// {base}license/{license}                {base}{slug}
/// {base}{slug}/etl                       {base}{slug}/distribution/{n}
/// {base}{slug}/event/{shard}/{row}       {base}{slug}/label/{subject}/{n}
/// {base}{slug}/split/{split_table_id}/{split}
/// ```
///
/// Every `{key}` is percent-encoded outside the unreserved set, so `/` never
/// appears inside a key and each scheme is injective.
#[derive(Clone, Debug)]
pub struct MappingContext {
    pub vocab: Vocabulary,
    base_iri: String,
    dataset_slug: String,
    pub include_event_provenance: bool,
    split_table_id: String,
    pub strictness: Strictness,
}

impl MappingContext {
    /// `base_iri` gets a trailing `/` unless it already ends in `/` or `#`.
    pub fn new(base_iri: &str, dataset_name: &str) -> Result<Self, TermError> {
        let mut base = base_iri.to_string();
        if !base.ends_with('/') && !base.ends_with('#') {
            base.push('/');
        }
        Iri::new(base.as_str())?;
        Ok(MappingContext {
            vocab: Vocabulary::default(),
            base_iri: base,
            dataset_slug: slugify(dataset_name),
            include_event_provenance: true,
            split_table_id: "default".into(),
            strictness: Strictness::FailFast,
        })
    }

    pub fn for_dataset(dataset_name: &str) -> Self {
        Self::new(DEFAULT_BASE_IRI, dataset_name).expect("default base IRI is valid")
    }

    pub fn with_vocabulary(mut self, vocab: Vocabulary) -> Self {
        self.vocab = vocab;
        self
    }

    pub fn with_event_provenance(mut self, on: bool) -> Self {
        self.include_event_provenance = on;
        self
    }

    pub fn with_split_table_id(mut self, id: &str) -> Self {
        self.split_table_id = encode_key(id);
        self
    }

    pub fn with_strictness(mut self, strictness: Strictness) -> Self {
        self.strictness = strictness;
        self
    }

    pub fn base_iri(&self) -> &str {
        &self.base_iri
    }

    pub fn dataset_slug(&self) -> &str {
        &self.dataset_slug
    }

    fn mint(&self, path: &str) -> Iri {
        Iri::new(format!("{}{path}", self.base_iri)).expect("minted IRIs are built from encoded keys")
    }

    pub fn subject_iri(&self, subject_id: &str) -> Iri {
        self.mint(&format!("subject/{}", encode_key(subject_id)))
    }

    pub fn event_iri(&self, shard_name: &str, row_index: usize) -> Iri {
        self.mint(&format!(
            "{}/event/{}/{row_index}",
            self.dataset_slug,
            encode_key(shard_name)
        ))
    }

    pub fn code_iri(&self, code: &str) -> Iri {
        self.mint(&format!("code/{}", encode_key(code)))
    }

    pub fn dataset_iri(&self) -> Iri {
        self.mint(&self.dataset_slug)
    }

    pub fn etl_iri(&self) -> Iri {
        self.mint(&format!("{}/etl", self.dataset_slug))
    }

    pub fn license_iri(&self, license: &str) -> Iri {
        self.mint(&format!("license/{}", encode_key(license)))
    }

    pub fn split_iri(&self, split_name: &str) -> Iri {
        self.mint(&format!(
            "{}/split/{}/{}",
            self.dataset_slug,
            self.split_table_id,
            encode_key(split_name)
        ))
    }

    pub fn label_iri(&self, subject_id: &str, ordinal: usize) -> Iri {
        self.mint(&format!(
            "{}/label/{}/{ordinal}",
            self.dataset_slug,
            encode_key(subject_id)
        ))
    }

    pub fn distribution_iri(&self, ordinal: usize) -> Iri {
        self.mint(&format!("{}/distribution/{ordinal}", self.dataset_slug))
    }

    /// Decoded key of an IRI minted under `{base}{kind}/`, or under the
    /// dataset namespace when `kind` starts with the slug.
    pub(crate) fn key_of(&self, iri: &Iri, prefix: &str) -> Option<String> {
        let rest = iri.as_str().strip_prefix(&self.base_iri)?.strip_prefix(prefix)?;
        if rest.contains('/') {
            return None;
        }
        decode_key(rest)
    }

    pub fn license_of(&self, iri: &Iri) -> Option<String> {
        self.key_of(iri, "license/")
    }

    pub fn split_name_of(&self, iri: &Iri) -> Option<String> {
        // Accept any split table under this dataset.
        let rest = iri
            .as_str()
            .strip_prefix(&self.base_iri)?
            .strip_prefix(&self.dataset_slug)?
            .strip_prefix("/split/")?;
        let (_, name) = rest.split_once('/')?;
        if name.contains('/') {
            return None;
        }
        decode_key(name)
    }

    /// Ordinal of a distribution IRI, used to restore `location_uri` order.
    pub fn distribution_ordinal_of(&self, iri: &Iri) -> Option<usize> {
        let prefix = format!("{}/distribution/", self.dataset_slug);
        self.key_of(iri, &prefix)?.parse().ok()
    }
}

/// Lowercase ASCII alphanumerics with single `-` separators.
pub fn slugify(name: &str) -> String {
    let mut slug = String::with_capacity(name.len());
    for c in name.chars() {
        if c.is_ascii_alphanumeric() {
            slug.push(c.to_ascii_lowercase());
        } else if !slug.is_empty() && !slug.ends_with('-') {
            slug.push('-');
        }
    }
    while slug.ends_with('-') {
        slug.pop();
    }
    if slug.is_empty() {
        slug.push_str("dataset");
    }
    slug
}
