use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{symbolic, SeparationCertificate, Separator, VerificationReport, Violation, CERTIFICATE_VERSION};
use crate::error::{Error, Result};
use crate::freeprod::{Letter, ReducedWord};
use crate::x0topology::XNeighborhood;

/// Largest number of selections an exhaustive check will enumerate.
pub const MAX_EXHAUSTIVE_SELECTIONS: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckMode {
    /// Every selection; requires all sets to be finite.
    Exhaustive,
    /// `k` independent selections, selection `i` drawn from a seed derived from `(seed, i)`.
    Sampled { k: usize, seed: u64 },
    /// Exact decision over the interval, ball and finite-set descriptors.
    Symbolic,
}

/// Seed of the `i`-th sampled selection.
pub fn selection_seed(seed: u64, i: u64) -> u64 {
    seed ^ (i.wrapping_add(1)).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

impl Separator {
    /// Structural checks: lengths, openness of every set, each letter in its
    /// own set, and the placement rule (non-identity letters get punctured
    /// sets in their own group, identity letters get around-identity sets).
    pub fn validate_certificate(&self, c: &SeparationCertificate) -> Result<()> {
        let groups = self.groups();
        let fp = self.free_product();
        if c.version != CERTIFICATE_VERSION {
            return Err(Error::Format(format!("unsupported certificate version {}", c.version)));
        }
        if c.config_digest != groups.digest() {
            return Err(Error::ConfigMismatch {
                expected: groups.digest().to_string(),
                found: c.config_digest.clone(),
            });
        }
        fp.check_cap(c.word.len())?;
        if c.neighborhoods.len() != c.word.len() || c.provenance.len() != c.word.len() {
            return Err(Error::Malformed(format!(
                "{} letters, {} neighborhoods, {} provenance lists",
                c.word.len(),
                c.neighborhoods.len(),
                c.provenance.len()
            )));
        }
        for (m, (letter, w)) in c.word.letters.iter().zip(&c.neighborhoods).enumerate() {
            groups
                .validate_x(w)
                .map_err(|e| Error::Malformed(format!("position {m}: {e}")))?;
            match (letter, w) {
                (Letter::Tagged(g), XNeighborhood::AwayFromIdentity(u)) if u.group == g.group => {}
                (Letter::Identity, XNeighborhood::AroundIdentity(_)) => {}
                _ => {
                    return Err(Error::Malformed(format!(
                        "position {m}: letter {} has the wrong kind of neighborhood",
                        fp.format_letter(letter)
                    )))
                }
            }
            if !groups.x_contains(w, letter) {
                return Err(Error::Malformed(format!(
                    "position {m}: letter {} is not in its neighborhood",
                    fp.format_letter(letter)
                )));
            }
        }
        Ok(())
    }

    /// Verifies that no selection from the certificate's sets reduces to a
    /// forbidden value (by default the certificate's own `forbidden` list).
    pub fn check_certificate(
        &self,
        c: &SeparationCertificate,
        mode: CheckMode,
        forbidden: Option<&[ReducedWord]>,
    ) -> Result<VerificationReport> {
        let start = Instant::now();
        self.validate_certificate(c)?;
        let forbidden = forbidden.unwrap_or(&c.forbidden);
        let groups = self.groups();
        let fp = self.free_product();
        let mut violations = Vec::new();
        let record = |selection: &[Letter], violations: &mut Vec<Violation>| {
            let value = fp.normal_form(selection);
            if let Some(k) = forbidden.iter().position(|f| *f == value) {
                violations.push(Violation {
                    selection: selection.to_vec(),
                    forbidden_index: k,
                });
            }
        };
        let checked = match mode {
            CheckMode::Exhaustive => {
                let choices = c
                    .neighborhoods
                    .iter()
                    .map(|w| groups.finite_points_x(w).ok_or(Error::ExhaustiveNotFinite))
                    .collect::<Result<Vec<_>>>()?;
                let total = choices
                    .iter()
                    .try_fold(1u64, |acc, cs| acc.checked_mul(cs.len() as u64))
                    .filter(|&t| t <= MAX_EXHAUSTIVE_SELECTIONS)
                    .ok_or_else(|| Error::Invalid("too many selections for an exhaustive check".into()))?;
                let mut index = vec![0usize; choices.len()];
                let mut selection: Vec<Letter> = choices.iter().map(|cs| cs[0].clone()).collect();
                for _ in 0..total {
                    record(&selection, &mut violations);
                    // Odometer step.
                    for pos in (0..index.len()).rev() {
                        index[pos] += 1;
                        if index[pos] < choices[pos].len() {
                            selection[pos] = choices[pos][index[pos]].clone();
                            break;
                        }
                        index[pos] = 0;
                        selection[pos] = choices[pos][0].clone();
                    }
                }
                total
            }
            CheckMode::Sampled { k, seed } => {
                if k == 0 {
                    return Err(Error::Invalid("sample count must be at least 1".into()));
                }
                let mut selection = Vec::with_capacity(c.neighborhoods.len());
                for i in 0..k as u64 {
                    let mut rng = ChaCha8Rng::seed_from_u64(selection_seed(seed, i));
                    selection.clear();
                    for w in &c.neighborhoods {
                        selection.push(groups.sample_x(w, &mut rng, 1)?.pop().expect("one point"));
                    }
                    record(&selection, &mut violations);
                }
                k as u64
            }
            CheckMode::Symbolic => {
                for (k, target) in forbidden.iter().enumerate() {
                    if let Some(selection) = symbolic::reaching_selection(fp, &c.neighborhoods, target) {
                        let reproduced = fp.normal_form(&selection) == *target
                            && selection
                                .iter()
                                .zip(&c.neighborhoods)
                                .all(|(y, w)| groups.x_contains(w, y));
                        if !reproduced {
                            return Err(Error::Invalid(
                                "symbolic witness does not reproduce".into(),
                            ));
                        }
                        violations.push(Violation {
                            selection,
                            forbidden_index: k,
                        });
                    }
                }
                forbidden.len() as u64
            }
        };
        Ok(VerificationReport {
            mode,
            selections_checked: checked,
            violations,
            elapsed: start.elapsed(),
        })
    }
}
