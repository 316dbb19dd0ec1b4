//! Choice of partial ensembles for one observable.

use std::collections::{BTreeMap, BTreeSet};

use crate::ensembles::UnitaryEnsemble;
use crate::error::Result;
use crate::operators::{
    activity_support, is_x_structured, ActivityPattern, Observable, PauliString,
};

/// One PSE of a plan together with the terms it estimates.
#[derive(Debug, Clone)]
pub struct PlannedPse {
    pub ensemble: UnitaryEnsemble,
    pub observable: Observable,
}

/// Smallest set of PSEs covering `obs`. X-structured observables, and any
/// observable when the state is known to be an X-state, need only ζ_X.
/// Otherwise diagonal and full-flip terms go to ζ_X and each remaining
/// flip cardinality gets the union of exactly the patterns it uses.
pub fn plan_pqst(obs: &Observable, x_prior: bool) -> Result<Vec<PlannedPse>> {
    let n = obs.n_qubits();
    if x_prior || is_x_structured(obs) {
        return Ok(vec![PlannedPse {
            ensemble: UnitaryEnsemble::zeta_x(n)?,
            observable: obs.clone(),
        }]);
    }
    let full = ActivityPattern::full(n);
    let diag = ActivityPattern::diagonal(n);
    // key 0 is the ζ_X group
    let mut groups: BTreeMap<usize, BTreeSet<ActivityPattern>> = BTreeMap::new();
    for pat in activity_support(obs) {
        let key = if pat == full || pat == diag {
            0
        } else {
            pat.order()
        };
        groups.entry(key).or_default().insert(pat);
    }
    groups
        .into_iter()
        .map(|(key, pats)| {
            let ensemble = if key == 0 {
                UnitaryEnsemble::zeta_x(n)?
            } else {
                let parts: Vec<Vec<usize>> = pats.iter().rev().map(|p| p.qubits()).collect();
                UnitaryEnsemble::zeta_union(n, &parts)?
            };
            let observable = obs
                .restrict(|t| pats.contains(&term_pattern(t)))
                .expect("group built from the observable's own terms");
            Ok(PlannedPse {
                ensemble,
                observable,
            })
        })
        .collect()
}

fn term_pattern(t: &PauliString) -> ActivityPattern {
    let single = Observable::single(t.clone());
    *activity_support(&single).iter().next().expect("one term")
}
