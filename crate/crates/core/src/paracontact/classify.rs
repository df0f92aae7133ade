use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::condition::ConditionId::{self, *};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Aggregate of one condition over all sampled points and probes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub id: ConditionId,
    pub points: usize,
    #[serde(deserialize_with = "residual")]
    pub max_raw: f64,
    #[serde(deserialize_with = "residual")]
    pub max_scaled: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
}

/// Reads back residuals that JSON could only store as `null` (non-finite).
pub fn residual<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
}

impl CheckResult {
    pub fn new(id: ConditionId, points: usize, max_raw: f64, max_scaled: f64, tolerance: f64) -> Self {
        let verdict = if max_scaled <= tolerance { Verdict::Pass } else { Verdict::Fail };
        CheckResult {
            id,
            points,
            max_raw,
            max_scaled,
            tolerance,
            verdict,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Class {
    #[serde(rename = "almost paracontact metric")]
    AlmostParacontactMetric,
    #[serde(rename = "paracontact metric")]
    ParacontactMetric,
    #[serde(rename = "normal")]
    Normal,
    #[serde(rename = "para-Sasakian")]
    ParaSasakian,
    #[serde(rename = "almost para-cosymplectic")]
    AlmostParaCosymplectic,
    #[serde(rename = "para-CR")]
    ParaCr,
    #[serde(rename = "para-Kähler leaves")]
    ParaKahlerLeaves,
}

impl Class {
    pub fn name(self) -> &'static str {
        match self {
            Class::AlmostParacontactMetric => "almost paracontact metric",
            Class::ParacontactMetric => "paracontact metric",
            Class::Normal => "normal",
            Class::ParaSasakian => "para-Sasakian",
            Class::AlmostParaCosymplectic => "almost para-cosymplectic",
            Class::ParaCr => "para-CR",
            Class::ParaKahlerLeaves => "para-Kähler leaves",
        }
    }

    /// Classes that make up a fingerprint; the base class is reported
    /// separately as structure validity.
    pub const FINGERPRINT: [Class; 6] = [
        Class::ParacontactMetric,
        Class::Normal,
        Class::ParaSasakian,
        Class::AlmostParaCosymplectic,
        Class::ParaCr,
        Class::ParaKahlerLeaves,
    ];
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassVerdict {
    Member,
    NotMember,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassEntry {
    pub class: Class,
    pub verdict: ClassVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub structure_valid: bool,
    pub classes: Vec<ClassEntry>,
    pub fingerprint: Vec<Class>,
}

impl Classification {
    pub fn verdict(&self, class: Class) -> Option<ClassVerdict> {
        self.classes.iter().find(|e| e.class == class).map(|e| e.verdict)
    }

    pub fn is(&self, class: Class) -> bool {
        self.verdict(class) == Some(ClassVerdict::Member)
    }
}

/// Conditions [`classify`] reads.
pub const CLASSIFY_INPUTS: [ConditionId; 25] = [
    Axioms,
    Compat,
    Normal,
    Pcm,
    Apcos,
    S0,
    S1,
    InvolutivityPlus,
    InvolutivityMinus,
    News00,
    News01,
    Thm1,
    NormalNabla,
    Wlasn,
    HProps,
    HRel,
    HZero,
    Lemat,
    Sas,
    Wzor1,
    Wzorzamk,
    Contparacr,
    Dacko,
    Wzor2,
    Paracrcos,
];

struct Reader<'a> {
    results: &'a BTreeMap<ConditionId, CheckResult>,
    separation: f64,
}

impl Reader<'_> {
    fn get(&self, c: ConditionId) -> Result<&CheckResult> {
        self.results.get(&c).ok_or(Error::NotComputed(c.id()))
    }

    fn pass(&self, c: ConditionId) -> Result<bool> {
        Ok(self.get(c)?.passed())
    }

    fn all(&self, cs: &[ConditionId]) -> Result<bool> {
        for &c in cs {
            if !self.pass(c)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn verdict(&self, cs: &[ConditionId]) -> Result<ClassVerdict> {
        if self.all(cs)? {
            return Ok(ClassVerdict::Member);
        }
        for &c in cs {
            if self.get(c)?.max_scaled > self.separation {
                return Ok(ClassVerdict::NotMember);
            }
        }
        Ok(ClassVerdict::Undetermined)
    }

    fn names(cs: &[ConditionId]) -> String {
        cs.iter().map(|c| c.id()).collect::<Vec<_>>().join("∧")
    }

    /// Two criteria that must agree.
    fn agree(&self, a: &[ConditionId], b: &[ConditionId]) -> Result<()> {
        let (va, vb) = (self.all(a)?, self.all(b)?);
        if va != vb {
            return Err(Error::InconsistentVerdict(format!(
                "{} {} but {} {}",
                Self::names(a),
                if va { "passes" } else { "fails" },
                Self::names(b),
                if vb { "passes" } else { "fails" },
            )));
        }
        Ok(())
    }

    /// `a` passing forces `b` to pass.
    fn implies(&self, a: &[ConditionId], b: &[ConditionId]) -> Result<()> {
        if self.all(a)? && !self.all(b)? {
            return Err(Error::InconsistentVerdict(format!(
                "{} passes but its consequence {} fails",
                Self::names(a),
                Self::names(b),
            )));
        }
        Ok(())
    }
}

/// Read class membership off aggregated check results and cross-check
/// the equivalent criteria against each other.
///
/// A class is a member when all its defining conditions pass, a
/// non-member when one of them exceeds `separation` somewhere, and
/// undetermined otherwise.
pub fn classify(results: &BTreeMap<ConditionId, CheckResult>, dim: usize, separation: f64) -> Result<Classification> {
    let r = Reader { results, separation };
    let para_cr = [S0, S1];
    let defs: [(Class, &[ConditionId]); 7] = [
        (Class::AlmostParacontactMetric, &[Axioms, Compat]),
        (Class::ParacontactMetric, &[Pcm]),
        (Class::Normal, &[Normal]),
        (Class::ParaSasakian, &[Normal, Pcm]),
        (Class::AlmostParaCosymplectic, &[Apcos]),
        (Class::ParaCr, &para_cr),
        (Class::ParaKahlerLeaves, &[Apcos, Wzor2]),
    ];
    let mut classes = Vec::with_capacity(defs.len());
    for (class, cs) in defs {
        classes.push(ClassEntry {
            class,
            verdict: r.verdict(cs)?,
        });
    }
    let structure_valid = r.all(&[Axioms, Compat])?;

    if structure_valid {
        r.agree(&para_cr, &[InvolutivityPlus, InvolutivityMinus])?;
        r.agree(&para_cr, &[News00, S1])?;
        r.agree(&para_cr, &[News01, S1])?;
        r.agree(&para_cr, &[Thm1])?;
        r.agree(&[S0], &[News00])?;
        r.agree(&[S0], &[News01])?;
        r.agree(&[Normal], &[NormalNabla])?;
        r.implies(&[Normal], &para_cr)?;
        r.implies(&[Normal], &[Wlasn])?;
        if dim == 3 {
            r.implies(&[Axioms, Compat], &para_cr)?;
        }
        if r.pass(Pcm)? {
            r.implies(&[Pcm], &[HProps, HRel, Lemat])?;
            r.agree(&para_cr, &[Wzor1])?;
            r.agree(&para_cr, &[Wzorzamk])?;
            r.agree(&para_cr, &[Contparacr])?;
            r.agree(&[Normal], &[Sas])?;
            if r.all(&para_cr)? {
                r.agree(&[Sas], &[HZero])?;
            }
        }
        if r.pass(Apcos)? {
            r.implies(&[Apcos], &[Dacko])?;
            r.agree(&para_cr, &[Wzor2])?;
            r.agree(&para_cr, &[Paracrcos])?;
        }
    }

    let fingerprint = classes
        .iter()
        .filter(|e| Class::FINGERPRINT.contains(&e.class) && e.verdict == ClassVerdict::Member)
        .map(|e| e.class)
        .collect();
    Ok(Classification {
        structure_valid,
        classes,
        fingerprint,
    })
}
