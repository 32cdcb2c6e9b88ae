use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::discipline::{DisciplineCode, DisciplineTable};
use crate::error::Error;

pub const DEFAULT_OBSERVATION_YEAR: i32 = 2012;

macro_rules! keyed_enum {
    (
        $(#[$meta:meta])*
        pub enum $name:ident {
            $($variant:ident => ($snake:literal, $key:literal, $label:literal $(, $extra:expr)?)),+ $(,)?
        }
    ) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            /// Canonical snake_case name used in files.
            pub fn name(&self) -> &'static str {
                match self { $($name::$variant => $snake),+ }
            }

            /// Short uppercase key.
            pub fn key(&self) -> &'static str {
                match self { $($name::$variant => $key),+ }
            }

            pub fn label(&self) -> &'static str {
                match self { $($name::$variant => $label),+ }
            }
        }

        impl FromStr for $name {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self, Error> {
                match s {
                    $($snake | $key => Ok($name::$variant),)+
                    _ => Err(Error::InvalidArgument(format!(
                        concat!("unknown ", stringify!($name), " `{}`"), s
                    ))),
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }

        impl Serialize for $name {
            fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(self.name())
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

/// The seven main publication categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MainCategory {
    JournalContribution,
    VolumeContribution,
    Book,
    ContributionInProceedings,
    Patents,
    Curatorship,
    Other,
}

impl MainCategory {
    pub const ALL: [MainCategory; 7] = [
        MainCategory::JournalContribution,
        MainCategory::VolumeContribution,
        MainCategory::Book,
        MainCategory::ContributionInProceedings,
        MainCategory::Patents,
        MainCategory::Curatorship,
        MainCategory::Other,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            MainCategory::JournalContribution => "Journal contribution",
            MainCategory::VolumeContribution => "Volume contribution",
            MainCategory::Book => "Book",
            MainCategory::ContributionInProceedings => "Contribution in proceedings",
            MainCategory::Patents => "Patents",
            MainCategory::Curatorship => "Curatorship",
            MainCategory::Other => "Other",
        }
    }
}

keyed_enum! {
    /// The 38 publication subtypes allowed in application forms.
    pub enum PublicationCategory {
        JournalPaper => ("journal_paper", "JRNL", "Journal paper"),
        AbstractInJournal => ("abstract_in_journal", "ABSJ", "Abstract in journal"),
        ReviewInJournal => ("review_in_journal", "REVJ", "Review in journal"),
        CommentOfVerdict => ("comment_of_verdict", "VERD", "Comment of verdict"),
        TranslationInJournal => ("translation_in_journal", "TRJ", "Translation in journal"),
        Bibliography => ("bibliography", "BIB", "Bibliography"),
        BookChapter => ("book_chapter", "CHAP", "Book chapter"),
        DictionaryEntry => ("dictionary_entry", "DICT", "Dictionary or encyclopedia entry"),
        CatalogueEntry => ("catalogue_entry", "CAT", "Catalogue entry"),
        Preface => ("preface", "PREF", "Preface/postface"),
        TranslationInVolume => ("translation_in_volume", "TRV", "Translation in volume"),
        Introduction => ("introduction", "INTRO", "Introduction"),
        ReviewInVolume => ("review_in_volume", "REVV", "Review in volume"),
        Monograph => ("monograph", "MONO", "Monograph or scientific treatise"),
        BookTranslation => ("book_translation", "TRB", "Book translation"),
        BibliographicEntry => ("bibliographic_entry", "BIBE", "Bibliographic entry"),
        CriticalEdition => ("critical_edition", "CRIT", "Critical edition of books/archaeological excavation"),
        ScientificCommentary => ("scientific_commentary", "COMM", "Scientific commentary"),
        NewDocument => ("new_document", "SRC", "Publication of new literary or archivistic document"),
        Index => ("index", "IDX", "Index"),
        Concordance => ("concordance", "CONC", "Concordance"),
        ProceedingsPaper => ("proceedings_paper", "PROC", "Paper in proceedings"),
        AbstractInProceedings => ("abstract_in_proceedings", "ABSP", "Abstract in proceedings"),
        Poster => ("poster", "POS", "Poster"),
        Patent => ("patent", "PAT", "Patent"),
        Curatorship => ("curatorship", "CUR", "Curatorship"),
        OtherPublication => ("other", "OP", "Other publication types"),
        Composition => ("composition", "COM", "Composition"),
        Database => ("database", "DB", "Database"),
        Exhibition => ("exhibition", "EXH", "Exhibition"),
        Software => ("software", "SW", "Software"),
        Exposition => ("exposition", "EXP", "Exposition"),
        Chart => ("chart", "CH", "Chart"),
        Drawing => ("drawing", "DRAW", "Drawing"),
        Design => ("design", "DES", "Design"),
        Performance => ("performance", "PERF", "Performance"),
        Artifact => ("artifact", "AF", "Artifact"),
        ArtPrototype => ("art_prototype", "ART", "Art prototype"),
    }
}

impl PublicationCategory {
    pub fn main_category(&self) -> MainCategory {
        use PublicationCategory::*;
        match self {
            JournalPaper | AbstractInJournal | ReviewInJournal | CommentOfVerdict
            | TranslationInJournal | Bibliography => MainCategory::JournalContribution,
            BookChapter | DictionaryEntry | CatalogueEntry | Preface | TranslationInVolume
            | Introduction | ReviewInVolume => MainCategory::VolumeContribution,
            Monograph | BookTranslation | BibliographicEntry | CriticalEdition
            | ScientificCommentary | NewDocument | Index | Concordance => MainCategory::Book,
            ProceedingsPaper | AbstractInProceedings | Poster => {
                MainCategory::ContributionInProceedings
            }
            Patent => MainCategory::Patents,
            Curatorship => MainCategory::Curatorship,
            _ => MainCategory::Other,
        }
    }
}

keyed_enum! {
    /// The 11 scientific-title categories an application may claim.
    pub enum TitleCategory {
        OtherTitles => ("other_titles", "OTH", "Other titles"),
        ResearchProjectParticipation => ("research_project_participation", "PART", "Participation to research projects"),
        FellowshipsAbroad => ("fellowships_abroad", "FELL", "Research or teaching fellowships abroad"),
        ScientificAwards => ("scientific_awards", "AWARD", "Scientific awards"),
        EditorialBoard => ("editorial_board", "EDB", "Membership of editorial board of journals"),
        ForeignInstitutes => ("foreign_institutes", "FOREIGN", "Involvement with foreign research institutes"),
        TechnologyTransfer => ("technology_transfer", "TT", "Technology transfer activities (e.g., startups)"),
        InstituteDirection => ("institute_direction", "DIR", "Direction of research institutes"),
        AcademyMembership => ("academy_membership", "ACAD", "Membership of scientific academies"),
        ProjectCoordination => ("project_coordination", "COORD", "Coordination of research projects"),
        EditorInChief => ("editor_in_chief", "EIC", "Editor in chief of journals, encyclopedias, or treatises"),
    }
}

keyed_enum! {
    pub enum Role {
        Associate => ("associate", "II", "Associate professor"),
        Full => ("full", "I", "Full professor"),
    }
}

keyed_enum! {
    pub enum Outcome {
        Qualified => ("qualified", "Q", "Qualified"),
        NotQualified => ("not_qualified", "NQ", "Not qualified"),
        Unknown => ("unknown", "U", "Unknown"),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Publication {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pub_year: Option<i32>,
    pub category: PublicationCategory,
    #[serde(default)]
    pub is_top_journal: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub citations: Option<u64>,
    /// Venue identifier matched against per-discipline top-journal lists.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub venue: Option<String>,
}

impl Publication {
    pub fn new(pub_year: Option<i32>, category: PublicationCategory) -> Self {
        Publication {
            pub_year,
            category,
            is_top_journal: false,
            citations: None,
            venue: None,
        }
    }

    pub fn with_citations(mut self, citations: u64) -> Self {
        self.citations = Some(citations);
        self
    }

    pub fn top_journal(mut self) -> Self {
        self.is_top_journal = true;
        self
    }
}

/// The identity triple of an applicant.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ApplicantKey {
    pub first_name: String,
    pub last_name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub birth_date: Option<NaiveDate>,
}

impl ApplicantKey {
    pub fn new(first: &str, last: &str, birth_date: Option<NaiveDate>) -> Self {
        ApplicantKey {
            first_name: first.to_string(),
            last_name: last.to_string(),
            birth_date,
        }
    }
}

impl fmt::Display for ApplicantKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.birth_date {
            Some(d) => write!(f, "{} {} ({})", self.first_name, self.last_name, d),
            None => write!(f, "{} {} (no birth date)", self.first_name, self.last_name),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Applicant {
    pub first_name: String,
    pub last_name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub birth_date: Option<NaiveDate>,
    #[serde(default)]
    pub publications: Vec<Publication>,
}

impl Applicant {
    pub fn key(&self) -> ApplicantKey {
        ApplicantKey {
            first_name: self.first_name.clone(),
            last_name: self.last_name.clone(),
            birth_date: self.birth_date,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Application {
    pub serial_id: u64,
    pub applicant_ref: ApplicantKey,
    pub discipline: DisciplineCode,
    pub role: Role,
    pub outcome: Outcome,
    #[serde(default)]
    pub report_text: String,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub titles: BTreeSet<TitleCategory>,
}

/// A validated, immutable corpus. Collections are keyed so iteration order
/// is deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub applicants: BTreeMap<ApplicantKey, Applicant>,
    pub applications: BTreeMap<u64, Application>,
    pub disciplines: DisciplineTable,
    pub observation_year: i32,
    pub top_journal_lists: BTreeMap<DisciplineCode, BTreeSet<String>>,
}

impl Default for Corpus {
    fn default() -> Self {
        Corpus::empty(DEFAULT_OBSERVATION_YEAR)
    }
}

impl Corpus {
    pub fn empty(observation_year: i32) -> Self {
        Corpus {
            applicants: BTreeMap::new(),
            applications: BTreeMap::new(),
            disciplines: DisciplineTable::bundled().clone(),
            observation_year,
            top_journal_lists: BTreeMap::new(),
        }
    }

    pub fn applicant(&self, key: &ApplicantKey) -> Option<&Applicant> {
        self.applicants.get(key)
    }

    /// Applications in serial order.
    pub fn applications(&self) -> impl Iterator<Item = &Application> {
        self.applications.values()
    }

    /// Disciplines that have at least one application, in code order.
    pub fn disciplines_in_use(&self) -> BTreeSet<DisciplineCode> {
        self.applications.values().map(|a| a.discipline).collect()
    }

    pub fn top_journals(&self, code: &DisciplineCode) -> Option<&BTreeSet<String>> {
        self.top_journal_lists.get(code)
    }

    /// Checks the referential invariants.
    pub fn validate(&self) -> crate::Result<()> {
        let mut seen = BTreeSet::new();
        for app in self.applications.values() {
            if self.disciplines.get(&app.discipline).is_none() {
                return Err(Error::UnknownDiscipline {
                    code: app.discipline.to_string(),
                    line: 0,
                });
            }
            if !self.applicants.contains_key(&app.applicant_ref) {
                return Err(Error::InvalidArgument(format!(
                    "application {} references unknown applicant {}",
                    app.serial_id, app.applicant_ref
                )));
            }
            if !seen.insert((app.applicant_ref.clone(), app.discipline, app.role)) {
                return Err(Error::InvalidArgument(format!(
                    "more than one application for {} in {} ({})",
                    app.applicant_ref, app.discipline, app.role
                )));
            }
        }
        Ok(())
    }
}
