use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Every pointwise condition the suite can evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum ConditionId {
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
    Jw3d,
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
    K1,
    K2,
}

use ConditionId::*;

impl ConditionId {
    pub const ALL: [ConditionId; 28] = [
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
        Jw3d,
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
        K1,
        K2,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Axioms => "axioms",
            Compat => "compat",
            Normal => "normal",
            Pcm => "pcm",
            Apcos => "apcos",
            S0 => "s0",
            S1 => "s1",
            InvolutivityPlus => "involutivity+",
            InvolutivityMinus => "involutivity-",
            News00 => "news00",
            News01 => "news01",
            Thm1 => "thm1",
            Jw3d => "jw3d",
            NormalNabla => "normal-nabla",
            Wlasn => "wlasn",
            HProps => "h-props",
            HRel => "h-rel",
            HZero => "h-zero",
            Lemat => "lemat",
            Sas => "sas",
            Wzor1 => "wzor1",
            Wzorzamk => "wzorzamk",
            Contparacr => "contparacr",
            Dacko => "dacko",
            Wzor2 => "wzor2",
            Paracrcos => "paracrcos",
            K1 => "k1",
            K2 => "k2",
        }
    }

    /// The residual evaluated, as printed by `list-checks`.
    pub fn description(self) -> &'static str {
        match self {
            Axioms => "structure axioms: φ² − I + ξ⊗η, η(ξ) − 1, φξ, η∘φ",
            Compat => "metric compatibility: g(φX,φY) + g(X,Y) − η(X)η(Y), η − g(·,ξ), Φ skew",
            Normal => "normality: N(X,Y) − 2dη(X,Y)ξ, N the Nijenhuis torsion of φ",
            Pcm => "paracontact metric: Φ − dη",
            Apcos => "almost para-cosymplectic: dη, dΦ",
            S0 => "para-CR (first half): η([φX,Y] + [X,φY]), X,Y ∈ D",
            S1 => "para-CR (second half): [X,Y] + [φX,φY] − φ([X,φY] + [φX,Y]), X,Y ∈ D",
            InvolutivityPlus => "[D⁺,D⁺] ⊂ D⁺: component of brackets outside D⁺",
            InvolutivityMinus => "[D⁻,D⁻] ⊂ D⁻: component of brackets outside D⁻",
            News00 => "Levi form symmetry: dη(X,φY) − dη(Y,φX), X,Y ∈ D",
            News01 => "(∇_Xη)(φY) + (∇_{φX}η)(Y) − (∇_Yη)(φX) − (∇_{φY}η)(X), X,Y ∈ D",
            Thm1 => "para-CR via ∇: (∇_Xφ)Y + (∇_{φX}φ)φY + ((∇_Yη)(φX) + (∇_{φY}η)(X))ξ, X,Y ∈ D",
            Jw3d => "dimension 3 identity: (∇_Xφ)Y − g(φ∇_Xξ,Y)ξ + η(Y)φ∇_Xξ",
            NormalNabla => "normality via ∇: φ(∇_Xφ)Y − (∇_{φX}φ)Y + (∇_Xη)(Y)ξ",
            Wlasn => "normal consequences: ∇_ξξ, ∇_ξη, ∇_{φX}ξ − φ∇_Xξ, ∇_ξφ",
            HProps => "h = ½L_ξφ: g(hX,Y) − g(hY,X), φh + hφ, Tr h, hξ, η∘h",
            HRel => "∇_Xξ + φX − φhX",
            HZero => "h = 0: hX",
            Lemat => "(∇_{φX}φ)φY − (∇_Xφ)Y − 2g(X,Y)ξ + η(Y)(X − hX + η(X)ξ)",
            Sas => "para-Sasakian: (∇_Xφ)Y + g(X,Y)ξ − η(Y)X",
            Wzor1 => "para-CR for paracontact metric: (∇_Xφ)Y − g(φ∇_Xξ,Y)ξ + η(Y)φ∇_Xξ",
            Wzorzamk => "para-CR for paracontact metric: (∇_Xφ)Y + g(X − hX,Y)ξ − η(Y)(X − hX)",
            Contparacr => "para-CR for paracontact metric: (∇_Xφ)Y + g(X − hX,Y)ξ, X,Y ∈ D",
            Dacko => "almost para-cosymplectic: ∇_ξξ, ∇_ξφ, ∇_{φX}ξ + φ∇_Xξ, (∇_{φX}φ)φY − (∇_Xφ)Y − η(Y)φ∇_Xξ",
            Wzor2 => "para-Kähler leaves: (∇_Xφ)Y − g(φ∇_Xξ,Y)ξ + η(Y)φ∇_Xξ",
            Paracrcos => "para-CR for almost para-cosymplectic: (∇_Xφ)Y − g(φ∇_Xξ,Y)ξ, X,Y ∈ D",
            K1 => "curvature identity: (R(W,X)φ)Y against ∇h and h (para-CR paracontact metric)",
            K2 => "curvature identity: g(R(W,X)φY, ξ) against ∇h and h (para-CR paracontact metric)",
        }
    }

    /// Whether the residual depends on the probe vectors.
    pub fn uses_probes(self) -> bool {
        !matches!(
            self,
            Axioms | Compat | Pcm | Apcos | InvolutivityPlus | InvolutivityMinus
        )
    }

    /// Whether probes are projected onto `D = ker η` first.
    pub fn restricted_to_d(self) -> bool {
        matches!(self, S0 | S1 | News00 | News01 | Thm1 | Contparacr | Paracrcos)
    }

    /// Chart dimension this condition requires, if any.
    pub fn required_dimension(self) -> Option<usize> {
        match self {
            Jw3d => Some(3),
            _ => None,
        }
    }

    pub fn applies_to(self, dim: usize) -> bool {
        self.required_dimension().is_none_or(|d| d == dim)
    }

    /// Conditions selected by `all` for a chart of dimension `dim`.
    pub fn all_for(dim: usize) -> Vec<ConditionId> {
        Self::ALL.iter().copied().filter(|c| c.applies_to(dim)).collect()
    }
}

impl fmt::Display for ConditionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for ConditionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|c| c.id() == s)
            .ok_or_else(|| Error::validation("checks", format!("unknown condition `{s}`")))
    }
}

impl From<ConditionId> for String {
    fn from(c: ConditionId) -> String {
        c.id().to_string()
    }
}

impl TryFrom<String> for ConditionId {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Named groups of conditions accepted wherever condition ids are.
pub const BUNDLES: &[(&str, &[ConditionId])] = &[
    ("structure", &[Axioms, Compat]),
    (
        "para-cr",
        &[S0, S1, InvolutivityPlus, InvolutivityMinus, News00, News01, Thm1],
    ),
    ("normal", &[Normal, NormalNabla, Wlasn]),
    (
        "paracontact",
        &[Pcm, HProps, HRel, Lemat, Wzor1, Wzorzamk, Contparacr],
    ),
    ("para-sasakian", &[Normal, Pcm, Sas, HZero]),
    ("cosymplectic", &[Apcos, Dacko, Wzor2, Paracrcos]),
    ("curvature", &[K1, K2]),
];

/// Expand a check list (ids, bundle names, or `all`) into an ordered,
/// de-duplicated condition list for a chart of dimension `dim`.
///
/// Explicitly named conditions that do not apply in `dim` are an error;
/// `all` and bundles silently skip them.
pub fn expand_checks<S: AsRef<str>>(items: &[S], dim: usize) -> Result<Vec<ConditionId>> {
    let mut out = Vec::new();
    for item in items {
        let item = item.as_ref().trim();
        if item == "all" {
            out.extend(ConditionId::all_for(dim));
        } else if let Some((_, list)) = BUNDLES.iter().find(|(name, _)| *name == item) {
            out.extend(list.iter().copied().filter(|c| c.applies_to(dim)));
        } else {
            let c: ConditionId = item.parse()?;
            if let Some(required) = c.required_dimension() {
                if required != dim {
                    return Err(Error::WrongDimension {
                        condition: c.id(),
                        required,
                        dim,
                    });
                }
            }
            out.push(c);
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}
