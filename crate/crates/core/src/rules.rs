//! Journal classification rules: the Spanish CIRC decision table (Social
//! Sciences and Humanities tracks) and the Danish authority levels with their
//! BFI points and level-2 production cap.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum RulesError {
    #[error("total production is zero")]
    EmptyProduction,
    #[error("unknown {kind} `{value}`")]
    Unknown { kind: &'static str, value: String },
    #[error("dossier for `{journal}` is inconsistent: {reason}")]
    InconsistentDossier { journal: String, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErihDiscipline {
    SocialSciences,
    Humanities,
    #[default]
    None,
}

impl FromStr for ErihDiscipline {
    type Err = RulesError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "social_sciences" => Ok(ErihDiscipline::SocialSciences),
            "humanities" => Ok(ErihDiscipline::Humanities),
            "none" | "" => Ok(ErihDiscipline::None),
            other => Err(RulesError::Unknown { kind: "ERIH discipline", value: other.into() }),
        }
    }
}

impl fmt::Display for ErihDiscipline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErihDiscipline::SocialSciences => "social_sciences",
            ErihDiscipline::Humanities => "humanities",
            ErihDiscipline::None => "none",
        })
    }
}

/// Everything the CIRC rules look at for one journal.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct JournalDossier {
    pub journal: String,
    pub jcr_ss_quartile: Option<u8>,
    pub indexed_ssci: bool,
    pub indexed_ahci: bool,
    pub scopus_ipp_quartile: Option<u8>,
    /// Present iff the journal is Scopus-indexed.
    pub ipp_value: Option<f64>,
    pub erih_plus: bool,
    pub erih_discipline: ErihDiscipline,
    pub fecyt_seal: bool,
    pub latindex_catalogue: bool,
    pub latindex_directory: bool,
}

impl JournalDossier {
    /// Checks the cross-field invariants. The classifiers themselves accept
    /// any dossier.
    pub fn validate(&self) -> Result<(), RulesError> {
        let fail = |reason: &str| {
            Err(RulesError::InconsistentDossier { journal: self.journal.clone(), reason: reason.into() })
        };
        for q in [self.jcr_ss_quartile, self.scopus_ipp_quartile].into_iter().flatten() {
            if !(1..=4).contains(&q) {
                return fail("quartiles must be 1-4");
            }
        }
        if self.jcr_ss_quartile.is_some() && !self.indexed_ssci {
            return fail("JCR Social Sciences quartile without SSCI indexing");
        }
        if self.latindex_catalogue && !self.latindex_directory {
            return fail("LATINDEX catalogue without directory");
        }
        if self.scopus_ipp_quartile.is_some() && self.ipp_value.is_none() {
            return fail("Scopus IPP quartile without IPP value");
        }
        if matches!(self.ipp_value, Some(v) if v.is_nan() || v < 0.0) {
            return fail("IPP value must be a nonnegative number");
        }
        Ok(())
    }

    fn scopus_zero_ipp(&self) -> bool {
        matches!(self.ipp_value, Some(v) if v <= 0.0)
    }
}

/// CIRC class. Variant order is the class order, worst first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ClassLabel {
    NotIncluded,
    D,
    C,
    B,
    A,
    APlus,
}

impl ClassLabel {
    /// Best first.
    pub const ALL: [ClassLabel; 6] =
        [ClassLabel::APlus, ClassLabel::A, ClassLabel::B, ClassLabel::C, ClassLabel::D, ClassLabel::NotIncluded];

    /// Corresponding Danish tier: A+/A are the prestigious classes, B-D the
    /// ordinary ones.
    pub fn tier(self) -> DanishLevel {
        match self {
            ClassLabel::APlus | ClassLabel::A => DanishLevel::Level2,
            ClassLabel::B | ClassLabel::C | ClassLabel::D => DanishLevel::Level1,
            ClassLabel::NotIncluded => DanishLevel::NotListed,
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassLabel::APlus => "A+",
            ClassLabel::A => "A",
            ClassLabel::B => "B",
            ClassLabel::C => "C",
            ClassLabel::D => "D",
            ClassLabel::NotIncluded => "Not included",
        })
    }
}

impl FromStr for ClassLabel {
    type Err = RulesError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "A+" => Ok(ClassLabel::APlus),
            "A" => Ok(ClassLabel::A),
            "B" => Ok(ClassLabel::B),
            "C" => Ok(ClassLabel::C),
            "D" => Ok(ClassLabel::D),
            "Not included" | "NotIncluded" | "" => Ok(ClassLabel::NotIncluded),
            other => Err(RulesError::Unknown { kind: "CIRC class", value: other.into() }),
        }
    }
}

/// Danish authority-list level. Variant order is the level order, lowest first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DanishLevel {
    NotListed,
    Level1,
    Level2,
}

impl DanishLevel {
    /// Best first.
    pub const ALL: [DanishLevel; 3] = [DanishLevel::Level2, DanishLevel::Level1, DanishLevel::NotListed];

    /// Numeric code used in level files and Table-style reports.
    pub fn code(self) -> u8 {
        match self {
            DanishLevel::Level2 => 2,
            DanishLevel::Level1 => 1,
            DanishLevel::NotListed => 0,
        }
    }
}

impl fmt::Display for DanishLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.code())
    }
}

impl FromStr for DanishLevel {
    type Err = RulesError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "2" | "Level2" => Ok(DanishLevel::Level2),
            "1" | "Level1" => Ok(DanishLevel::Level1),
            "0" | "NotListed" => Ok(DanishLevel::NotListed),
            other => Err(RulesError::Unknown { kind: "Danish level", value: other.into() }),
        }
    }
}

/// CIRC Social Sciences track; the highest class whose criterion holds.
pub fn classify_circ_social(d: &JournalDossier) -> ClassLabel {
    let jcr = d.jcr_ss_quartile;
    let ipp_q = d.scopus_ipp_quartile;
    if jcr == Some(1) {
        ClassLabel::APlus
    } else if ((d.indexed_ssci || d.indexed_ahci) && jcr != Some(4)) || ipp_q == Some(1) {
        ClassLabel::A
    } else if jcr == Some(4)
        || (matches!(ipp_q, Some(2..=4)) && matches!(d.ipp_value, Some(v) if v > 0.0))
        || d.fecyt_seal
    {
        ClassLabel::B
    } else if d.scopus_zero_ipp()
        || (d.erih_plus && d.erih_discipline == ErihDiscipline::SocialSciences)
        || d.latindex_catalogue
    {
        ClassLabel::C
    } else if d.latindex_directory {
        ClassLabel::D
    } else {
        ClassLabel::NotIncluded
    }
}

/// CIRC Humanities track. Only the A+ and B cells carry criteria for this
/// track; every other journal is not included.
pub fn classify_circ_humanities(d: &JournalDossier) -> ClassLabel {
    if d.indexed_ahci && d.scopus_ipp_quartile == Some(1) {
        ClassLabel::APlus
    } else if d.erih_plus && d.erih_discipline == ErihDiscipline::Humanities {
        ClassLabel::B
    } else {
        ClassLabel::NotIncluded
    }
}

pub fn bfi_points(level: DanishLevel) -> f64 {
    match level {
        DanishLevel::Level2 => 3.0,
        DanishLevel::Level1 => 1.0,
        DanishLevel::NotListed => 0.0,
    }
}

/// Maximum share of world production that level-2 journals may cover.
pub const LEVEL2_MAX_SHARE: f64 = 0.20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShareCheck {
    pub share: f64,
    pub pass: bool,
}

/// Share of world production published in the level-2 set; passes when the
/// share is at most 20% (inclusive).
pub fn validate_level2_share(
    production: &BTreeMap<String, f64>,
    level2: &BTreeSet<String>,
) -> Result<ShareCheck, RulesError> {
    let total: f64 = production.values().sum();
    if total.is_nan() || total <= 0.0 {
        return Err(RulesError::EmptyProduction);
    }
    let covered: f64 = production.iter().filter(|(j, _)| level2.contains(*j)).map(|(_, n)| n).sum();
    let share = covered / total;
    Ok(ShareCheck { share, pass: share <= LEVEL2_MAX_SHARE })
}
