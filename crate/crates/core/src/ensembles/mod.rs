//! Measurement ensembles: partial sets `ζ_A` and their unions, local Pauli
//! words, global Cliffords and mutually unbiased bases.

mod clifford;
mod mub;
mod symplectic;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

pub use clifford::{
    clifford_group, clifford_group_order, sample_global_clifford, stabilizer_states, Tableau,
};
pub use mub::{mub_bases, mub_unitaries};

use crate::error::{PqstError, Result};
use crate::gates::{local_word_label, local_word_matrix, LocalGate};
use crate::linalg::Operator;
use crate::operators::ActivityPattern;

pub const MAX_QUBITS: usize = 4;

/// Which inverse turns a rotated outcome projector into a single-shot shadow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InverseKind {
    /// `p·A − 1`
    Pseudo,
    /// `(2^n+1)·A − Tr(A)·1`
    GlobalDepolarizing,
    /// `⊗_j (3·A_j − Tr(A_j)·1)` on each site factor
    PerSitePauli,
}

impl fmt::Display for InverseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InverseKind::Pseudo => "pseudo",
            InverseKind::GlobalDepolarizing => "global-depolarizing",
            InverseKind::PerSitePauli => "per-site-pauli",
        })
    }
}

#[derive(Debug, Clone)]
enum Members {
    Explicit {
        matrices: Arc<Vec<Operator>>,
        /// Present for tensor-product ensembles built from local gates.
        words: Option<Arc<Vec<Vec<LocalGate>>>>,
    },
    /// Uniform Clifford draws on registers too large to enumerate.
    CliffordSampler,
}

#[derive(Debug, Clone)]
pub struct UnitaryEnsemble {
    name: String,
    n: usize,
    members: Members,
    p: f64,
    inverse: InverseKind,
    signature: BTreeSet<ActivityPattern>,
    diagonal_exact: bool,
}

fn check_n(n: usize) -> Result<()> {
    if (1..=MAX_QUBITS).contains(&n) {
        Ok(())
    } else {
        Err(PqstError::InvalidArgument(format!(
            "register size {n} outside 1..={MAX_QUBITS}"
        )))
    }
}

/// Identity plus every `{H, HS}` word on the qubits of `pattern`.
fn zeta_words(pattern: &ActivityPattern) -> Vec<Vec<LocalGate>> {
    let n = pattern.n();
    let qubits = pattern.qubits();
    let mut words = vec![vec![LocalGate::Id; n]];
    for choice in 0..1usize << qubits.len() {
        let mut w = vec![LocalGate::Id; n];
        for (i, &q) in qubits.iter().enumerate() {
            let bit = choice >> (qubits.len() - 1 - i) & 1;
            w[q - 1] = if bit == 0 {
                LocalGate::H
            } else {
                LocalGate::HS
            };
        }
        words.push(w);
    }
    words
}

fn qubit_list(pattern: &ActivityPattern) -> String {
    pattern
        .qubits()
        .iter()
        .map(|q| q.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

impl UnitaryEnsemble {
    fn from_words(
        name: String,
        n: usize,
        words: Vec<Vec<LocalGate>>,
        p: f64,
        inverse: InverseKind,
        signature: BTreeSet<ActivityPattern>,
        diagonal_exact: bool,
    ) -> Self {
        let matrices = words.iter().map(|w| local_word_matrix(w)).collect();
        Self {
            name,
            n,
            members: Members::Explicit {
                matrices: Arc::new(matrices),
                words: Some(Arc::new(words)),
            },
            p,
            inverse,
            signature,
            diagonal_exact,
        }
    }

    /// `ζ_A`: `2^{|A|} + 1` members, `p = 2^{|A|} + 1`.
    pub fn zeta_a(n: usize, qubits: &[usize]) -> Result<Self> {
        check_n(n)?;
        if qubits.is_empty() {
            return Err(PqstError::InvalidSubset(
                "the active set must be non-empty".into(),
            ));
        }
        let pattern = ActivityPattern::from_qubits(n, qubits)?;
        let words = zeta_words(&pattern);
        let full = pattern == ActivityPattern::full(n);
        let name = if full {
            "zeta-X".to_string()
        } else {
            format!("zeta-A:{}", qubit_list(&pattern))
        };
        let p = words.len() as f64;
        Ok(Self::from_words(
            name,
            n,
            words,
            p,
            InverseKind::Pseudo,
            [pattern].into(),
            full,
        ))
    }

    /// `ζ_X`, the full-register `ζ_A`.
    pub fn zeta_x(n: usize) -> Result<Self> {
        check_n(n)?;
        Self::zeta_a(n, &(1..=n).collect::<Vec<_>>())
    }

    /// Union of `ζ_A` over distinct subsets of one size; `p` is the union size.
    pub fn zeta_union(n: usize, parts: &[Vec<usize>]) -> Result<Self> {
        check_n(n)?;
        if parts.is_empty() {
            return Err(PqstError::InvalidSubset("empty union".into()));
        }
        let patterns = parts
            .iter()
            .map(|q| {
                if q.is_empty() {
                    Err(PqstError::InvalidSubset(
                        "the active set must be non-empty".into(),
                    ))
                } else {
                    ActivityPattern::from_qubits(n, q)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let size = patterns[0].order();
        if patterns.iter().any(|p| p.order() != size) {
            return Err(PqstError::InvalidSubset(
                "union parts must have equal cardinality".into(),
            ));
        }
        let signature: BTreeSet<ActivityPattern> = patterns.iter().copied().collect();
        if signature.len() != patterns.len() {
            return Err(PqstError::InvalidSubset(
                "union parts must be distinct".into(),
            ));
        }
        if patterns.len() == 1 {
            return Self::zeta_a(n, &parts[0]);
        }
        let mut words: Vec<Vec<LocalGate>> = Vec::new();
        for pat in &patterns {
            for w in zeta_words(pat) {
                if !words.contains(&w) {
                    words.push(w);
                }
            }
        }
        let name = patterns
            .iter()
            .map(|p| format!("zeta-A:{}", qubit_list(p)))
            .collect::<Vec<_>>()
            .join("|");
        let p = words.len() as f64;
        Ok(Self::from_words(
            name,
            n,
            words,
            p,
            InverseKind::Pseudo,
            signature,
            false,
        ))
    }

    /// All `m`-active classes at once: `C(n,m)·2^m + 1` members.
    pub fn zeta_m_active(n: usize, m: usize) -> Result<Self> {
        check_n(n)?;
        if m == 0 || m > n {
            return Err(PqstError::InvalidSubset(format!("m = {m} outside 1..={n}")));
        }
        let parts: Vec<Vec<usize>> = ActivityPattern::all(n)
            .into_iter()
            .rev()
            .filter(|p| p.order() == m)
            .map(|p| p.qubits())
            .collect();
        let mut e = Self::zeta_union(n, &parts)?;
        e.name = if m == n {
            "zeta-X".into()
        } else {
            format!("zeta-m:{m}")
        };
        Ok(e)
    }

    /// `{1, H, HS}^{⊗n}` with the per-site inverse.
    pub fn pauli(n: usize) -> Result<Self> {
        check_n(n)?;
        let mut words = vec![Vec::new()];
        for _ in 0..n {
            words = words
                .into_iter()
                .flat_map(|w: Vec<LocalGate>| {
                    [LocalGate::Id, LocalGate::H, LocalGate::HS].map(|g| {
                        let mut w = w.clone();
                        w.push(g);
                        w
                    })
                })
                .collect();
        }
        Ok(Self::from_words(
            "pauli".into(),
            n,
            words,
            3.0,
            InverseKind::PerSitePauli,
            ActivityPattern::all(n).into_iter().collect(),
            true,
        ))
    }

    /// Global Cliffords: enumerated for `n <= 2`, sampled for `n = 3`.
    pub fn clifford(n: usize) -> Result<Self> {
        check_n(n)?;
        let members = if n <= 2 {
            Members::Explicit {
                matrices: clifford_group(n)?,
                words: None,
            }
        } else if n == 3 {
            Members::CliffordSampler
        } else {
            return Err(PqstError::InvalidArgument(
                "Clifford ensembles support up to 3 qubits".into(),
            ));
        };
        Ok(Self::global("clifford", n, members))
    }

    pub fn mub(n: usize) -> Result<Self> {
        check_n(n)?;
        let members = Members::Explicit {
            matrices: Arc::new(mub_unitaries(n)?),
            words: None,
        };
        Ok(Self::global("mub", n, members))
    }

    fn global(name: &str, n: usize, members: Members) -> Self {
        Self {
            name: name.into(),
            n,
            members,
            p: ((1usize << n) + 1) as f64,
            inverse: InverseKind::GlobalDepolarizing,
            signature: ActivityPattern::all(n).into_iter().collect(),
            diagonal_exact: true,
        }
    }

    /// Parses a CLI ensemble name: `zeta-X`, `zeta-A:1,2`, `zeta-m:2`,
    /// `pauli`, `clifford`, `mub`, or `zeta-A` parts joined by `|`.
    pub fn parse(n: usize, text: &str) -> Result<Self> {
        let text = text.trim();
        if text.contains('|') {
            let parts = text
                .split('|')
                .map(|part| {
                    let part = part.trim();
                    part.strip_prefix("zeta-A:")
                        .ok_or_else(|| {
                            PqstError::UnknownEnsemble(format!(
                                "`{part}` in union; only zeta-A parts can be joined"
                            ))
                        })
                        .and_then(parse_qubits)
                })
                .collect::<Result<Vec<_>>>()?;
            return Self::zeta_union(n, &parts);
        }
        match text {
            "zeta-X" => Self::zeta_x(n),
            "pauli" => Self::pauli(n),
            "clifford" => Self::clifford(n),
            "mub" => Self::mub(n),
            _ => {
                if let Some(rest) = text.strip_prefix("zeta-A:") {
                    Self::zeta_a(n, &parse_qubits(rest)?)
                } else if let Some(rest) = text.strip_prefix("zeta-m:") {
                    let m = rest.trim().parse().map_err(|_| {
                        PqstError::UnknownEnsemble(format!("`{text}`: m must be an integer"))
                    })?;
                    Self::zeta_m_active(n, m)
                } else {
                    Err(PqstError::UnknownEnsemble(text.to_string()))
                }
            }
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn inverse_kind(&self) -> InverseKind {
        self.inverse
    }

    /// Activity patterns this ensemble is built to estimate.
    pub fn signature(&self) -> &BTreeSet<ActivityPattern> {
        &self.signature
    }

    /// Whether the diagonal of the exact-mode estimate equals the state's.
    pub fn diagonal_exact(&self) -> bool {
        self.diagonal_exact
    }

    /// Signature plus the diagonal class when that is exact too.
    pub fn trusted(&self) -> BTreeSet<ActivityPattern> {
        let mut t = self.signature.clone();
        if self.diagonal_exact {
            t.insert(ActivityPattern::diagonal(self.n));
        }
        t
    }

    pub fn is_explicit(&self) -> bool {
        matches!(self.members, Members::Explicit { .. })
    }

    /// Member count; `None` for sampled ensembles.
    pub fn member_count(&self) -> Option<usize> {
        match &self.members {
            Members::Explicit { matrices, .. } => Some(matrices.len()),
            Members::CliffordSampler => None,
        }
    }

    pub fn members(&self) -> Result<&[Operator]> {
        match &self.members {
            Members::Explicit { matrices, .. } => Ok(matrices),
            Members::CliffordSampler => Err(PqstError::ImplicitEnsemble(self.name.clone())),
        }
    }

    pub fn local_words(&self) -> Option<&[Vec<LocalGate>]> {
        match &self.members {
            Members::Explicit {
                words: Some(words), ..
            } => Some(words),
            _ => None,
        }
    }

    pub fn member_label(&self, i: usize) -> String {
        match self.local_words() {
            Some(words) => local_word_label(&words[i]),
            None => format!("{}[{i}]", self.name),
        }
    }

    /// Uniformly drawn member, by index for explicit ensembles.
    pub fn sample_member<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(Option<usize>, Operator)> {
        match &self.members {
            Members::Explicit { matrices, .. } => {
                let i = rng.random_range(0..matrices.len());
                Ok((Some(i), matrices[i].clone()))
            }
            Members::CliffordSampler => Ok((None, Tableau::random(self.n, rng)?.to_unitary())),
        }
    }

    /// Same members with a different inverse. The per-site inverse needs
    /// local tensor words.
    pub fn with_inverse(&self, inverse: InverseKind) -> Result<Self> {
        if inverse == InverseKind::PerSitePauli && self.local_words().is_none() {
            return Err(PqstError::InvalidArgument(format!(
                "`{}` has no local tensor structure for the per-site inverse",
                self.name
            )));
        }
        let mut e = self.clone();
        e.inverse = inverse;
        Ok(e)
    }

    /// Same members with a different pseudo-inverse strength.
    pub fn with_p(&self, p: f64) -> Result<Self> {
        if !(p.is_finite() && p > 0.0) {
            return Err(PqstError::InvalidArgument(format!(
                "p = {p} must be positive"
            )));
        }
        let mut e = self.clone();
        e.p = p;
        Ok(e)
    }

    pub fn info(&self) -> EnsembleInfo {
        EnsembleInfo {
            name: self.name.clone(),
            n_qubits: self.n,
            members: self.member_count(),
            p: self.p,
            inverse: self.inverse,
            signature: self.signature.iter().map(|p| p.to_string()).collect(),
            diagonal_exact: self.diagonal_exact,
            member_labels: match self.local_words() {
                Some(words) => words.iter().map(|w| local_word_label(w)).collect(),
                None => Vec::new(),
            },
        }
    }
}

fn parse_qubits(list: &str) -> Result<Vec<usize>> {
    list.split(',')
        .map(|s| {
            s.trim().parse::<usize>().map_err(|_| {
                PqstError::InvalidSubset(format!("`{}` is not a qubit label", s.trim()))
            })
        })
        .collect()
}

/// Splits a comma-separated list of ensemble names. A comma followed by a
/// digit continues the qubit list of the current `zeta-A:` item.
pub fn split_ensemble_list(list: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for piece in list.split(',') {
        let continues = piece
            .trim_start()
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_digit());
        match out.last_mut() {
            Some(last) if continues => {
                last.push(',');
                last.push_str(piece.trim());
            }
            _ => out.push(piece.trim().to_string()),
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct EnsembleInfo {
    pub name: String,
    pub n_qubits: usize,
    pub members: Option<usize>,
    pub p: f64,
    pub inverse: InverseKind,
    pub signature: Vec<String>,
    pub diagonal_exact: bool,
    pub member_labels: Vec<String>,
}

impl fmt::Display for EnsembleInfo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ensemble   {}", self.name)?;
        writeln!(f, "qubits     {}", self.n_qubits)?;
        match self.members {
            Some(m) => writeln!(f, "members    {m}")?,
            None => writeln!(f, "members    sampled (uniform Clifford)")?,
        }
        writeln!(f, "p          {}", self.p)?;
        writeln!(f, "inverse    {}", self.inverse)?;
        writeln!(f, "signature  {}", self.signature.join(" "))?;
        write!(
            f,
            "diagonal   {}",
            if self.diagonal_exact {
                "exact"
            } else {
                "untrusted"
            }
        )?;
        if !self.member_labels.is_empty() {
            write!(f, "\nunitaries  {}", self.member_labels.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::symplectic::rounded_key;
    use std::collections::HashSet;

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    fn labels(e: &UnitaryEnsemble) -> Vec<String> {
        (0..e.member_count().unwrap())
            .map(|i| e.member_label(i))
            .collect()
    }

    #[test]
    fn zeta_examples() {
        let e = UnitaryEnsemble::zeta_a(2, &[1]).unwrap();
        assert_eq!(labels(&e), vec!["1⊗1", "H⊗1", "HS⊗1"]);
        assert_eq!(e.p(), 3.0);
        let e = UnitaryEnsemble::zeta_a(3, &[1, 2]).unwrap();
        assert_eq!((e.member_count(), e.p()), (Some(5), 5.0));
        let x = UnitaryEnsemble::zeta_a(2, &[1, 2]).unwrap();
        assert_eq!(x.name(), "zeta-X");
        assert_eq!(labels(&x), vec!["1⊗1", "H⊗H", "H⊗HS", "HS⊗H", "HS⊗HS"]);
        assert!(x.diagonal_exact());
        assert!(UnitaryEnsemble::zeta_a(2, &[]).is_err());
        assert!(UnitaryEnsemble::zeta_a(2, &[3]).is_err());
    }

    #[test]
    fn union_examples() {
        let e = UnitaryEnsemble::zeta_union(3, &[vec![1, 2], vec![2, 3]]).unwrap();
        assert_eq!((e.member_count(), e.p()), (Some(9), 9.0));
        assert_eq!(e.signature().len(), 2);
        let e = UnitaryEnsemble::zeta_union(3, &[vec![1], vec![2]]).unwrap();
        assert_eq!((e.member_count(), e.p()), (Some(5), 5.0));
        let z1 = UnitaryEnsemble::zeta_union(2, &[vec![1], vec![2]]).unwrap();
        let got: HashSet<String> = labels(&z1).into_iter().collect();
        let want: HashSet<String> = ["1⊗1", "H⊗1", "1⊗H", "1⊗HS", "HS⊗1"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(got, want);
        assert!(!z1.diagonal_exact());
        assert!(UnitaryEnsemble::zeta_union(3, &[vec![1], vec![2, 3]]).is_err());
        assert!(UnitaryEnsemble::zeta_union(3, &[vec![1], vec![1]]).is_err());
        assert!(UnitaryEnsemble::zeta_union(3, &[]).is_err());
    }

    #[test]
    fn sizes_hold_exhaustively() {
        for n in 1..=4 {
            for pat in ActivityPattern::all(n).into_iter().skip(1) {
                let e = UnitaryEnsemble::zeta_a(n, &pat.qubits()).unwrap();
                assert_eq!(e.member_count().unwrap(), (1 << pat.order()) + 1);
                assert_eq!(e.p(), e.member_count().unwrap() as f64);
            }
            for m in 1..=n {
                let e = UnitaryEnsemble::zeta_m_active(n, m).unwrap();
                assert_eq!(
                    e.member_count().unwrap(),
                    binom(n, m) * (1 << m) + 1,
                    "n={n} m={m}"
                );
                assert_eq!(e.p(), e.member_count().unwrap() as f64);
            }
        }
        let sizes: Vec<usize> = (1..=3)
            .map(|m| {
                UnitaryEnsemble::zeta_m_active(3, m)
                    .unwrap()
                    .member_count()
                    .unwrap()
            })
            .collect();
        assert_eq!(sizes, vec![7, 13, 9]);
    }

    #[test]
    fn pauli_sizes() {
        for (n, size) in [(1, 3), (2, 9), (3, 27)] {
            assert_eq!(
                UnitaryEnsemble::pauli(n).unwrap().member_count(),
                Some(size)
            );
        }
        let labels1 = labels(&UnitaryEnsemble::pauli(1).unwrap());
        assert_eq!(labels1, vec!["1", "H", "HS"]);
    }

    #[test]
    fn members_are_unitary_and_distinct() {
        let mut ensembles = vec![
            UnitaryEnsemble::pauli(3).unwrap(),
            UnitaryEnsemble::clifford(2).unwrap(),
            UnitaryEnsemble::mub(3).unwrap(),
        ];
        for n in 2..=3 {
            for m in 1..=n {
                ensembles.push(UnitaryEnsemble::zeta_m_active(n, m).unwrap());
            }
        }
        for e in &ensembles {
            let mut keys = HashSet::new();
            for u in e.members().unwrap() {
                assert!(u.unitarity_residual() <= 1e-10);
                assert!(
                    keys.insert(rounded_key(u.phase_canonical().as_slice())),
                    "{}",
                    e.name()
                );
            }
        }
        assert!(UnitaryEnsemble::clifford(3).unwrap().members().is_err());
        assert_eq!(UnitaryEnsemble::mub(2).unwrap().member_count(), Some(5));
    }

    #[test]
    fn parse_names() {
        assert_eq!(
            UnitaryEnsemble::parse(2, "zeta-X").unwrap().member_count(),
            Some(5)
        );
        assert_eq!(
            UnitaryEnsemble::parse(3, "zeta-A:1,3").unwrap().name(),
            "zeta-A:1,3"
        );
        assert_eq!(
            UnitaryEnsemble::parse(3, "zeta-m:2")
                .unwrap()
                .member_count(),
            Some(13)
        );
        let u = UnitaryEnsemble::parse(3, "zeta-A:1,2|zeta-A:2,3").unwrap();
        assert_eq!(u.p(), 9.0);
        assert_eq!(u.name(), "zeta-A:1,2|zeta-A:2,3");
        assert!(matches!(
            UnitaryEnsemble::parse(2, "haar"),
            Err(PqstError::UnknownEnsemble(_))
        ));
        assert!(UnitaryEnsemble::parse(2, "zeta-A:x").is_err());
        assert!(UnitaryEnsemble::parse(2, "zeta-X|zeta-A:1").is_err());
    }

    #[test]
    fn list_splitting_keeps_qubit_lists() {
        assert_eq!(
            split_ensemble_list("zeta-X,zeta-A:1|zeta-A:2"),
            vec!["zeta-X", "zeta-A:1|zeta-A:2"]
        );
        assert_eq!(
            split_ensemble_list("zeta-A:1,2, zeta-A:2,3,mub"),
            vec!["zeta-A:1,2", "zeta-A:2,3", "mub"]
        );
    }

    #[test]
    fn info_mentions_the_essentials() {
        let text = UnitaryEnsemble::zeta_x(2).unwrap().info().to_string();
        assert!(text.contains("members    5"));
        assert!(text.contains("p          5"));
        assert!(text.contains("{1,2}"));
        let text = UnitaryEnsemble::clifford(3).unwrap().info().to_string();
        assert!(text.contains("sampled"));
    }
}
