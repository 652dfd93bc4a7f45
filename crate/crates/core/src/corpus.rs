//! Canonical license data: identifiers, reference texts, normalized word
//! sets, human-readable descriptions, the compatibility matrix, and the
//! permissiveness order.
//!
//! All of it is data, not code: the texts live under `data/texts/`, the
//! matrix and ranks in `data/matrix.toml`, and the free-form-name pattern
//! table in `data/name_patterns.toml`. Everything is embedded into the
//! binary at build time and can be overridden per file from a directory
//! passed to [`Corpus::load`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::sync::LazyLock;

use regex::{Regex, RegexBuilder};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::detector::{normalize_tokens, TokenSet};
use crate::error::{Error, Result};

/// The closed set of supported SPDX identifiers, plus the two in-band
/// non-licenses: `Unknown` (text or name that could not be recognized) and
/// `None` (no license present at all).
///
/// Variants are declared in lexicographic SPDX-id order so that the derived
/// `Ord` doubles as the deterministic tie-break order used by the detector.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum LicenseId {
    Agpl3,
    Apache2,
    Bsd2,
    Bsd3,
    Cddl1,
    Epl1,
    Epl2,
    Gpl2,
    Gpl2Classpath,
    Gpl3,
    Isc,
    Lgpl21,
    Lgpl3,
    Mit,
    Mpl1,
    Mpl2,
    Unknown,
    None,
}

impl LicenseId {
    /// All 16 supported licenses, in SPDX-lexicographic order.
    pub const SUPPORTED: [LicenseId; 16] = [
        LicenseId::Agpl3,
        LicenseId::Apache2,
        LicenseId::Bsd2,
        LicenseId::Bsd3,
        LicenseId::Cddl1,
        LicenseId::Epl1,
        LicenseId::Epl2,
        LicenseId::Gpl2,
        LicenseId::Gpl2Classpath,
        LicenseId::Gpl3,
        LicenseId::Isc,
        LicenseId::Lgpl21,
        LicenseId::Lgpl3,
        LicenseId::Mit,
        LicenseId::Mpl1,
        LicenseId::Mpl2,
    ];

    /// The SPDX identifier, or `None` for the two non-license values.
    pub fn spdx_id(self) -> Option<&'static str> {
        match self {
            LicenseId::Agpl3 => Some("AGPL-3.0-only"),
            LicenseId::Apache2 => Some("Apache-2.0"),
            LicenseId::Bsd2 => Some("BSD-2-Clause"),
            LicenseId::Bsd3 => Some("BSD-3-Clause"),
            LicenseId::Cddl1 => Some("CDDL-1.0"),
            LicenseId::Epl1 => Some("EPL-1.0"),
            LicenseId::Epl2 => Some("EPL-2.0"),
            LicenseId::Gpl2 => Some("GPL-2.0-only"),
            LicenseId::Gpl2Classpath => Some("GPL-2.0-with-classpath-exception"),
            LicenseId::Gpl3 => Some("GPL-3.0-only"),
            LicenseId::Isc => Some("ISC"),
            LicenseId::Lgpl21 => Some("LGPL-2.1-only"),
            LicenseId::Lgpl3 => Some("LGPL-3.0-only"),
            LicenseId::Mit => Some("MIT"),
            LicenseId::Mpl1 => Some("MPL-1.0"),
            LicenseId::Mpl2 => Some("MPL-2.0"),
            LicenseId::Unknown | LicenseId::None => None,
        }
    }

    pub fn is_supported(self) -> bool {
        !matches!(self, LicenseId::Unknown | LicenseId::None)
    }

    /// Strict parse: the rendered form of every `LicenseId` (SPDX id,
    /// `unknown`, or `none`), case-insensitively. Anything else is `None`.
    pub fn try_parse(s: &str) -> Option<LicenseId> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("unknown") {
            return Some(LicenseId::Unknown);
        }
        if s.eq_ignore_ascii_case("none") {
            return Some(LicenseId::None);
        }
        LicenseId::SUPPORTED
            .into_iter()
            .find(|id| s.eq_ignore_ascii_case(id.spdx_id().unwrap()))
    }

    /// Lenient parse used on external data (pom names, provider answers):
    /// an exact, case-insensitive SPDX id matches, everything else is
    /// `Unknown`. Round-trips the rendering of every variant.
    pub fn parse_spdx(s: &str) -> LicenseId {
        LicenseId::try_parse(s).unwrap_or(LicenseId::Unknown)
    }
}

impl fmt::Display for LicenseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.spdx_id() {
            Some(id) => f.write_str(id),
            None if *self == LicenseId::Unknown => f.write_str("unknown"),
            None => f.write_str("none"),
        }
    }
}

impl Serialize for LicenseId {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for LicenseId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        LicenseId::try_parse(&s)
            .ok_or_else(|| D::Error::custom(format!("unrecognized license id `{s}`")))
    }
}

/// Display metadata for one license, mirroring the usual
/// permissions/limitations/conditions summary triple.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Description {
    pub permissions: Vec<String>,
    pub limitations: Vec<String>,
    pub conditions: Vec<String>,
}

/// Everything the tool knows about one supported license.
#[derive(Clone, Debug)]
pub struct LicenseRecord {
    pub id: LicenseId,
    /// The canonical reference text, verbatim.
    pub canonical_text: String,
    /// `normalize_tokens(canonical_text)`, precomputed.
    pub word_set: TokenSet,
    pub description: Description,
    /// Module licenses under which a module may use a library under this
    /// license.
    pub compatible_module_licenses: BTreeSet<LicenseId>,
    /// Position in the total permissiveness order; lower is more permissive.
    pub permissiveness_rank: u32,
}

/// The compatibility matrix as a standalone view: library license → set of
/// module licenses allowed to use it.
#[derive(Clone, Debug)]
pub struct CompatibilityMatrix {
    version: u32,
    entries: BTreeMap<LicenseId, BTreeSet<LicenseId>>,
}

impl CompatibilityMatrix {
    pub fn version(&self) -> u32 {
        self.version
    }

    /// The module licenses compatible with a library under `library`.
    /// `None` for unsupported ids.
    pub fn compatible_with(&self, library: LicenseId) -> Option<&BTreeSet<LicenseId>> {
        self.entries.get(&library)
    }

    /// True when a module licensed `module` may use a library licensed
    /// `library`. Unsupported module values (`unknown`, `none`) are in no
    /// row and therefore never permitted.
    pub fn permits(&self, module: LicenseId, library: LicenseId) -> bool {
        self.entries
            .get(&library)
            .is_some_and(|set| set.contains(&module))
    }
}

/// The loaded corpus: one record per supported license, the matrix view,
/// and the ordered free-form-name pattern table.
pub struct Corpus {
    version: u32,
    records: BTreeMap<LicenseId, LicenseRecord>,
    matrix: CompatibilityMatrix,
    name_patterns: Vec<(Regex, LicenseId)>,
}

const MATRIX_TOML: &str = include_str!("../data/matrix.toml");
const PATTERNS_TOML: &str = include_str!("../data/name_patterns.toml");

const CANONICAL_TEXTS: [(LicenseId, &str); 16] = [
    (LicenseId::Agpl3, include_str!("../data/texts/AGPL-3.0-only.txt")),
    (LicenseId::Apache2, include_str!("../data/texts/Apache-2.0.txt")),
    (LicenseId::Bsd2, include_str!("../data/texts/BSD-2-Clause.txt")),
    (LicenseId::Bsd3, include_str!("../data/texts/BSD-3-Clause.txt")),
    (LicenseId::Cddl1, include_str!("../data/texts/CDDL-1.0.txt")),
    (LicenseId::Epl1, include_str!("../data/texts/EPL-1.0.txt")),
    (LicenseId::Epl2, include_str!("../data/texts/EPL-2.0.txt")),
    (LicenseId::Gpl2, include_str!("../data/texts/GPL-2.0-only.txt")),
    (
        LicenseId::Gpl2Classpath,
        include_str!("../data/texts/GPL-2.0-with-classpath-exception.txt"),
    ),
    (LicenseId::Gpl3, include_str!("../data/texts/GPL-3.0-only.txt")),
    (LicenseId::Isc, include_str!("../data/texts/ISC.txt")),
    (LicenseId::Lgpl21, include_str!("../data/texts/LGPL-2.1-only.txt")),
    (LicenseId::Lgpl3, include_str!("../data/texts/LGPL-3.0-only.txt")),
    (LicenseId::Mit, include_str!("../data/texts/MIT.txt")),
    (LicenseId::Mpl1, include_str!("../data/texts/MPL-1.0.txt")),
    (LicenseId::Mpl2, include_str!("../data/texts/MPL-2.0.txt")),
];

static EMBEDDED: LazyLock<Corpus> = LazyLock::new(|| {
    Corpus::load(None).expect("embedded corpus data is self-consistent (checked by tests)")
});

#[derive(Deserialize)]
struct MatrixFile {
    version: u32,
    licenses: BTreeMap<String, MatrixRow>,
}

#[derive(Deserialize)]
struct MatrixRow {
    rank: u32,
    compatible: Vec<String>,
    permissions: Vec<String>,
    limitations: Vec<String>,
    conditions: Vec<String>,
}

#[derive(Deserialize)]
struct PatternFile {
    pattern: Vec<PatternRow>,
}

#[derive(Deserialize)]
struct PatternRow {
    regex: String,
    id: String,
}

impl Corpus {
    /// The corpus built from the data files embedded at compile time.
    /// Loaded once; `'static` thereafter.
    pub fn embedded() -> &'static Corpus {
        &EMBEDDED
    }

    /// Loads the corpus, taking `matrix.toml`, `name_patterns.toml`, and
    /// `texts/<id>.txt` from `override_dir` when present there and from the
    /// embedded copies otherwise.
    pub fn load(override_dir: Option<&Path>) -> Result<Corpus> {
        let read_override = |name: &str| -> Result<Option<String>> {
            let Some(dir) = override_dir else { return Ok(None) };
            let path = dir.join(name);
            if !path.exists() {
                return Ok(None);
            }
            std::fs::read_to_string(&path)
                .map(Some)
                .map_err(|e| Error::Io { path, cause: e })
        };

        let matrix_toml = read_override("matrix.toml")?;
        let patterns_toml = read_override("name_patterns.toml")?;
        let matrix_file: MatrixFile =
            toml::from_str(matrix_toml.as_deref().unwrap_or(MATRIX_TOML)).map_err(|e| {
                Error::DataFormat { what: "matrix.toml".into(), detail: e.to_string() }
            })?;
        let pattern_file: PatternFile =
            toml::from_str(patterns_toml.as_deref().unwrap_or(PATTERNS_TOML)).map_err(|e| {
                Error::DataFormat { what: "name_patterns.toml".into(), detail: e.to_string() }
            })?;

        let parse_id = |what: &str, s: &str| -> Result<LicenseId> {
            match LicenseId::try_parse(s) {
                Some(id) if id.is_supported() => Ok(id),
                _ => Err(Error::DataFormat {
                    what: what.into(),
                    detail: format!("`{s}` is not a supported license id"),
                }),
            }
        };

        let mut records = BTreeMap::new();
        let mut entries = BTreeMap::new();
        for (key, row) in &matrix_file.licenses {
            let id = parse_id("matrix.toml", key)?;
            let mut compatible = BTreeSet::new();
            for name in &row.compatible {
                compatible.insert(parse_id("matrix.toml", name)?);
            }
            let canonical_text = match read_override(&format!("texts/{id}.txt"))? {
                Some(text) => text,
                None => CANONICAL_TEXTS
                    .iter()
                    .find(|(t, _)| *t == id)
                    .map(|(_, text)| text.to_string())
                    .expect("every supported id has an embedded text"),
            };
            let word_set = normalize_tokens(&canonical_text);
            entries.insert(id, compatible.clone());
            records.insert(
                id,
                LicenseRecord {
                    id,
                    canonical_text,
                    word_set,
                    description: Description {
                        permissions: row.permissions.clone(),
                        limitations: row.limitations.clone(),
                        conditions: row.conditions.clone(),
                    },
                    compatible_module_licenses: compatible,
                    permissiveness_rank: row.rank,
                },
            );
        }

        let mut name_patterns = Vec::with_capacity(pattern_file.pattern.len());
        for row in &pattern_file.pattern {
            let regex = RegexBuilder::new(&row.regex)
                .case_insensitive(true)
                .build()
                .map_err(|e| Error::DataFormat {
                    what: "name_patterns.toml".into(),
                    detail: format!("bad regex `{}`: {e}", row.regex),
                })?;
            name_patterns.push((regex, parse_id("name_patterns.toml", &row.id)?));
        }

        let corpus = Corpus {
            version: matrix_file.version,
            records,
            matrix: CompatibilityMatrix { version: matrix_file.version, entries },
            name_patterns,
        };
        corpus.validate()?;
        Ok(corpus)
    }

    /// Structural checks on the loaded data; violated invariants here mean
    /// the data files are wrong, not the caller.
    fn validate(&self) -> Result<()> {
        let fail = |detail: String| Error::DataFormat { what: "matrix.toml".into(), detail };

        if self.records.len() != LicenseId::SUPPORTED.len() {
            return Err(fail(format!(
                "expected {} license rows, found {}",
                LicenseId::SUPPORTED.len(),
                self.records.len()
            )));
        }
        let mut ranks = BTreeSet::new();
        for record in self.records.values() {
            if !ranks.insert(record.permissiveness_rank) {
                return Err(fail(format!(
                    "duplicate permissiveness rank {}",
                    record.permissiveness_rank
                )));
            }
            if !record.compatible_module_licenses.contains(&record.id) {
                return Err(fail(format!("row {} is not reflexive", record.id)));
            }
        }
        let agpl = &self.records[&LicenseId::Agpl3].compatible_module_licenses;
        if agpl.len() != 1 || !agpl.contains(&LicenseId::Agpl3) {
            return Err(fail("AGPL-3.0-only row must be exactly {AGPL-3.0-only}".into()));
        }
        Ok(())
    }

    /// Version stamp of the matrix data file (carried into reports).
    pub fn version(&self) -> u32 {
        self.version
    }

    /// The corpus entry for a supported license.
    pub fn lookup(&self, id: LicenseId) -> Result<&LicenseRecord> {
        self.records.get(&id).ok_or(Error::NoSuchLicense(id))
    }

    pub fn records(&self) -> impl Iterator<Item = &LicenseRecord> {
        self.records.values()
    }

    pub fn matrix(&self) -> &CompatibilityMatrix {
        &self.matrix
    }

    /// The ordered free-form-name pattern table (first match wins).
    pub fn name_patterns(&self) -> &[(Regex, LicenseId)] {
        &self.name_patterns
    }

    /// The unique candidate with the lowest permissiveness rank.
    pub fn most_permissive(&self, candidates: &BTreeSet<LicenseId>) -> Result<LicenseId> {
        if candidates.is_empty() {
            return Err(Error::EmptyCandidates);
        }
        let mut best: Option<&LicenseRecord> = None;
        for id in candidates {
            let record = self.lookup(*id)?;
            if best.is_none_or(|b| record.permissiveness_rank < b.permissiveness_rank) {
                best = Some(record);
            }
        }
        Ok(best.expect("candidates is non-empty").id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus() -> &'static Corpus {
        Corpus::embedded()
    }

    #[test]
    fn enum_order_matches_spdx_lexicographic_order() {
        let mut rendered: Vec<&str> =
            LicenseId::SUPPORTED.iter().map(|id| id.spdx_id().unwrap()).collect();
        let by_enum = rendered.clone();
        rendered.sort_unstable();
        assert_eq!(by_enum, rendered);
    }

    #[test]
    fn spdx_rendering_round_trips_for_every_variant() {
        for id in LicenseId::SUPPORTED
            .into_iter()
            .chain([LicenseId::Unknown, LicenseId::None])
        {
            assert_eq!(LicenseId::parse_spdx(&id.to_string()), id);
        }
    }

    #[test]
    fn parse_spdx_is_case_insensitive_and_unknown_on_miss() {
        assert_eq!(LicenseId::parse_spdx("Apache-2.0"), LicenseId::Apache2);
        assert_eq!(LicenseId::parse_spdx("apache-2.0"), LicenseId::Apache2);
        assert_eq!(LicenseId::parse_spdx("Eclipse Thing License 9.9"), LicenseId::Unknown);
    }

    #[test]
    fn lookup_covers_the_supported_set_and_rejects_the_rest() {
        for id in LicenseId::SUPPORTED {
            let record = corpus().lookup(id).unwrap();
            assert_eq!(record.id, id);
            assert!(!record.canonical_text.is_empty());
        }
        assert!(matches!(
            corpus().lookup(LicenseId::Unknown),
            Err(Error::NoSuchLicense(LicenseId::Unknown))
        ));
    }

    #[test]
    fn word_sets_regenerate_from_canonical_texts() {
        for record in corpus().records() {
            assert_eq!(
                record.word_set,
                normalize_tokens(&record.canonical_text),
                "word_set for {} is stale",
                record.id
            );
        }
    }

    #[test]
    fn agpl_row_is_exactly_itself() {
        let record = corpus().lookup(LicenseId::Agpl3).unwrap();
        assert_eq!(
            record.compatible_module_licenses,
            BTreeSet::from([LicenseId::Agpl3])
        );
    }

    #[test]
    fn matrix_is_reflexive_and_never_contains_non_licenses() {
        for id in LicenseId::SUPPORTED {
            let row = corpus().matrix().compatible_with(id).unwrap();
            assert!(row.contains(&id), "row {id} is not reflexive");
            assert!(!row.contains(&LicenseId::Unknown));
            assert!(!row.contains(&LicenseId::None));
        }
    }

    #[test]
    fn ranks_are_a_total_order_over_the_supported_set() {
        let ranks: BTreeSet<u32> =
            corpus().records().map(|r| r.permissiveness_rank).collect();
        assert_eq!(ranks.len(), 16);
    }

    #[test]
    fn most_permissive_picks_the_rank_minimum() {
        let c = corpus();
        let set = BTreeSet::from([LicenseId::Agpl3]);
        assert_eq!(c.most_permissive(&set).unwrap(), LicenseId::Agpl3);

        let set = BTreeSet::from([LicenseId::Mit, LicenseId::Gpl3, LicenseId::Agpl3]);
        assert_eq!(c.most_permissive(&set).unwrap(), LicenseId::Mit);

        assert!(matches!(
            c.most_permissive(&BTreeSet::new()),
            Err(Error::EmptyCandidates)
        ));
    }

    #[test]
    fn most_permissive_agrees_with_the_rank_table_on_every_pair() {
        let c = corpus();
        for a in LicenseId::SUPPORTED {
            for b in LicenseId::SUPPORTED {
                let picked = c.most_permissive(&BTreeSet::from([a, b])).unwrap();
                let ra = c.lookup(a).unwrap().permissiveness_rank;
                let rb = c.lookup(b).unwrap().permissiveness_rank;
                let expected = if ra <= rb { a } else { b };
                assert_eq!(picked, expected);
            }
        }
    }

    #[test]
    fn matrix_dir_override_replaces_rows_and_keeps_validation() {
        let dir = tempfile::tempdir().unwrap();
        // A deliberately different matrix: GPL-3.0 row opened up to MIT.
        let mutated = MATRIX_TOML.replace(
            "compatible = [\"GPL-3.0-only\", \"AGPL-3.0-only\"]",
            "compatible = [\"GPL-3.0-only\", \"AGPL-3.0-only\", \"MIT\"]",
        );
        assert_ne!(mutated, MATRIX_TOML, "replacement anchor went stale");
        std::fs::write(dir.path().join("matrix.toml"), mutated).unwrap();

        let overridden = Corpus::load(Some(dir.path())).unwrap();
        assert!(overridden.matrix().permits(LicenseId::Mit, LicenseId::Gpl3));
        assert!(!Corpus::embedded().matrix().permits(LicenseId::Mit, LicenseId::Gpl3));

        // Breaking an invariant in the override must fail loading.
        let broken = MATRIX_TOML.replace(
            "compatible = [\"AGPL-3.0-only\"]",
            "compatible = [\"AGPL-3.0-only\", \"MIT\"]",
        );
        std::fs::write(dir.path().join("matrix.toml"), broken).unwrap();
        assert!(Corpus::load(Some(dir.path())).is_err());
    }
}
