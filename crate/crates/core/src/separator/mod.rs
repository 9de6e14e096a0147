//! Explicit separation of a word with nontrivial value from the identity.
//!
//! For a word `x_1 … x_n` whose value in the free product is not 1, the
//! separator builds open sets `W_1, …, W_n` of the wedge space with
//! `x_m ∈ W_m` such that no selection `y_m ∈ W_m` multiplies to 1:
//!
//! 1. For every group `i` and every subterm over positions carrying letters
//!    of `G_i` or the identity whose value is not 1, the uniform case gives
//!    neighborhoods `U_m` in `G_i` whose pointwise product misses 1. A
//!    non-identity letter gets `U_m` punctured at 1; an identity letter gets
//!    an around-identity set with home component `U_m` and a default
//!    identity neighborhood in every other group.
//! 2. `W_m` is the intersection of all such sets at position `m`.
//!
//! Every selection from the result relates to the original word through the
//! two cancellation-lemma hypotheses, which forces its value to differ from 1.

mod check;
mod symbolic;

use std::time::Duration;

pub use check::{selection_seed, CheckMode, MAX_EXHAUSTIVE_SELECTIONS};

use crate::error::{Error, Result};
use crate::freeprod::{FreeProduct, Letter, ReducedWord, Word};
use crate::topogroups::{GroupElement, GroupId, Groups};
use crate::x0topology::{IdentityScales, XNeighborhood};

pub const CERTIFICATE_VERSION: u32 = 1;

/// A uniform subterm whose neighborhoods were intersected into a position.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Provenance {
    /// Which entry of `forbidden` the subterm was built against.
    pub forbidden_index: usize,
    pub group: GroupId,
    /// Positions in the word extended by the inverse of the forbidden value.
    pub positions: Vec<usize>,
    pub value: GroupElement,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparationCertificate {
    pub version: u32,
    pub config_digest: String,
    pub word: Word,
    /// Values no selection may reach; `[ε]` for separation from the identity.
    pub forbidden: Vec<ReducedWord>,
    pub neighborhoods: Vec<XNeighborhood>,
    pub provenance: Vec<Vec<Provenance>>,
    pub scales: IdentityScales,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub selection: Vec<Letter>,
    pub forbidden_index: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub mode: CheckMode,
    pub selections_checked: u64,
    pub violations: Vec<Violation>,
    pub elapsed: Duration,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Builds and checks separation certificates.
#[derive(Clone, Debug)]
pub struct Separator {
    fp: FreeProduct,
    scales: IdentityScales,
}

impl Separator {
    pub fn new(fp: FreeProduct, scales: IdentityScales) -> Result<Separator> {
        if scales.euclidean_radius <= Default::default() {
            return Err(Error::Invalid("default Euclidean radius must be positive".into()));
        }
        Ok(Separator { fp, scales })
    }

    pub fn standard() -> Separator {
        Separator {
            fp: FreeProduct::standard(),
            scales: IdentityScales::default(),
        }
    }

    pub fn free_product(&self) -> &FreeProduct {
        &self.fp
    }

    pub fn groups(&self) -> &Groups {
        self.fp.groups()
    }

    pub fn scales(&self) -> &IdentityScales {
        &self.scales
    }

    /// Neighborhoods for a subterm all of whose letters lie in `group`
    /// (identity letters allowed), whose ordered product is not 1.
    pub fn uniform_case(&self, group: GroupId, xs: &[Letter]) -> Result<Vec<XNeighborhood>> {
        let groups = self.groups();
        let elements = xs
            .iter()
            .map(|l| {
                l.in_group(groups, group).ok_or_else(|| Error::GroupMismatch {
                    left: groups.name(group).to_string(),
                    right: self.fp.format_letter(l),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let us = groups.separate_identity_uniform(&elements)?;
        Ok(xs
            .iter()
            .zip(us)
            .map(|(l, u)| match l {
                Letter::Tagged(_) => XNeighborhood::AwayFromIdentity(u.punctured()),
                Letter::Identity => {
                    let components = groups
                        .ids()
                        .map(|id| {
                            if id == group {
                                u.clone()
                            } else {
                                groups.default_identity_neighborhood(id, &self.scales)
                            }
                        })
                        .collect();
                    XNeighborhood::AroundIdentity(components)
                }
            })
            .collect())
    }

    /// Intersects the uniform-case neighborhoods of every subterm of
    /// `letters` (identity letters joining every group) whose value is not 1.
    fn build(
        &self,
        letters: &[Letter],
        forbidden_index: usize,
    ) -> Result<(Vec<XNeighborhood>, Vec<Vec<Provenance>>)> {
        let groups = self.groups();
        let n = letters.len();
        let mut acc: Vec<Option<XNeighborhood>> = vec![None; n];
        let mut provenance: Vec<Vec<Provenance>> = vec![Vec::new(); n];
        for group in groups.ids() {
            let eligible: Vec<usize> = (0..n)
                .filter(|&m| letters[m].group().is_none_or(|g| g == group))
                .collect();
            let mut subterms: Vec<(Vec<usize>, GroupElement)> = Vec::new();
            let mut current = Vec::new();
            let identity = groups.identity(group);
            collect_subterms(groups, letters, &eligible, 0, &mut current, &identity, &mut subterms);
            for (positions, value) in subterms {
                let xs: Vec<Letter> = positions.iter().map(|&m| letters[m].clone()).collect();
                let ws = self.uniform_case(group, &xs)?;
                for (&m, w) in positions.iter().zip(ws) {
                    acc[m] = Some(match acc[m].take() {
                        None => w,
                        // All sets at a position share its letter as center,
                        // so the intersection is never empty.
                        Some(prev) => groups.x_intersect(&prev, &w)?,
                    });
                    provenance[m].push(Provenance {
                        forbidden_index,
                        group,
                        positions: positions.clone(),
                        value: value.clone(),
                    });
                }
            }
        }
        let neighborhoods = acc
            .into_iter()
            .enumerate()
            .map(|(m, w)| match w {
                Some(w) => w,
                None => {
                    // Every tagged letter is a nontrivial singleton subterm.
                    assert!(letters[m].is_identity(), "uncovered tagged letter at {m}");
                    groups.default_around_identity(&self.scales)
                }
            })
            .collect();
        Ok((neighborhoods, provenance))
    }

    fn certificate(
        &self,
        word: &Word,
        forbidden: Vec<ReducedWord>,
        neighborhoods: Vec<XNeighborhood>,
        provenance: Vec<Vec<Provenance>>,
    ) -> SeparationCertificate {
        SeparationCertificate {
            version: CERTIFICATE_VERSION,
            config_digest: self.groups().digest().to_string(),
            word: word.clone(),
            forbidden,
            neighborhoods,
            provenance,
            scales: self.scales.clone(),
        }
    }

    pub fn separate_word_from_identity(&self, w: &Word) -> Result<SeparationCertificate> {
        if self.fp.reduce(w)?.is_empty() {
            return Err(Error::WordIsIdentity);
        }
        let (neighborhoods, provenance) = self.build(&w.letters, 0)?;
        Ok(self.certificate(w, vec![ReducedWord::empty()], neighborhoods, provenance))
    }

    /// Separates the value of `w` from `target` by separating `w · target⁻¹`
    /// from 1 and keeping the first `|w|` positions. The tail letters are
    /// members of their own sets, so the guarantee carries over.
    pub fn separate_from_point(&self, w: &Word, target: &ReducedWord) -> Result<SeparationCertificate> {
        let (neighborhoods, provenance) = self.separate_from_point_parts(w, target, 0)?;
        Ok(self.certificate(w, vec![target.clone()], neighborhoods, provenance))
    }

    fn separate_from_point_parts(
        &self,
        w: &Word,
        target: &ReducedWord,
        forbidden_index: usize,
    ) -> Result<(Vec<XNeighborhood>, Vec<Vec<Provenance>>)> {
        if self.fp.reduce(w)? == *target {
            return Err(Error::PointsEqual);
        }
        let extended = w.concat(&self.fp.word_inv(target).to_word());
        self.fp.check_cap(extended.len())?;
        let (mut neighborhoods, mut provenance) = self.build(&extended.letters, forbidden_index)?;
        neighborhoods.truncate(w.len());
        provenance.truncate(w.len());
        Ok((neighborhoods, provenance))
    }

    /// Neighborhood systems at each witness whose products avoid every
    /// excluded value: a finite demonstration that `G ∖ excluded` satisfies
    /// the product condition of the X₀-topology at those witnesses.
    pub fn certify_open_complement(
        &self,
        witnesses: &[Word],
        excluded: &[ReducedWord],
    ) -> Result<Vec<SeparationCertificate>> {
        let groups = self.groups();
        let mut out = Vec::with_capacity(witnesses.len());
        for (index, w) in witnesses.iter().enumerate() {
            let value = self.fp.reduce(w)?;
            if excluded.contains(&value) {
                return Err(Error::WitnessInExcluded { index });
            }
            let (neighborhoods, provenance) = if excluded.is_empty() {
                self.singleton_system(w)?
            } else {
                let mut combined: Option<(Vec<XNeighborhood>, Vec<Vec<Provenance>>)> = None;
                for (k, target) in excluded.iter().enumerate() {
                    let (ns, ps) = self.separate_from_point_parts(w, target, k)?;
                    combined = Some(match combined {
                        None => (ns, ps),
                        Some((acc, mut acc_p)) => {
                            let merged = acc
                                .iter()
                                .zip(&ns)
                                .map(|(a, b)| groups.x_intersect(a, b))
                                .collect::<Result<Vec<_>>>()
                                .map_err(|e| match e {
                                    Error::EmptyIntersection(g) => Error::EmptyIntersection(format!(
                                        "{g} (witness {index}, excluded {k})"
                                    )),
                                    other => other,
                                })?;
                            for (p, q) in acc_p.iter_mut().zip(ps) {
                                p.extend(q);
                            }
                            (merged, acc_p)
                        }
                    });
                }
                combined.expect("excluded is nonempty")
            };
            out.push(self.certificate(w, excluded.to_vec(), neighborhoods, provenance));
        }
        Ok(out)
    }

    /// Basic neighborhoods of each letter on its own; used when nothing is excluded.
    fn singleton_system(&self, w: &Word) -> Result<(Vec<XNeighborhood>, Vec<Vec<Provenance>>)> {
        self.fp.check_cap(w.len())?;
        let mut neighborhoods = Vec::with_capacity(w.len());
        let mut provenance = Vec::with_capacity(w.len());
        for (m, l) in w.letters.iter().enumerate() {
            match l {
                Letter::Identity => {
                    neighborhoods.push(self.groups().default_around_identity(&self.scales));
                    provenance.push(Vec::new());
                }
                Letter::Tagged(g) => {
                    let mut ws = self.uniform_case(g.group, std::slice::from_ref(l))?;
                    neighborhoods.push(ws.pop().expect("one letter"));
                    provenance.push(vec![Provenance {
                        forbidden_index: 0,
                        group: g.group,
                        positions: vec![m],
                        value: g.clone(),
                    }]);
                }
            }
        }
        Ok((neighborhoods, provenance))
    }
}

/// Depth-first enumeration of the subsets of `eligible` in lexicographic
/// order, carrying the running product. Subsets with value 1 are skipped.
fn collect_subterms(
    groups: &Groups,
    letters: &[Letter],
    eligible: &[usize],
    start: usize,
    current: &mut Vec<usize>,
    prefix: &GroupElement,
    out: &mut Vec<(Vec<usize>, GroupElement)>,
) {
    for idx in start..eligible.len() {
        let m = eligible[idx];
        let value = match &letters[m] {
            Letter::Identity => prefix.clone(),
            Letter::Tagged(g) => groups.mul(prefix, g).expect("eligible letters share the group"),
        };
        current.push(m);
        if !groups.is_identity(&value) {
            out.push((current.clone(), value.clone()));
        }
        collect_subterms(groups, letters, eligible, idx + 1, current, &value, out);
        current.pop();
    }
}
