//! Seeded inputs shared by the benchmarks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use freeprod_core::gen::WordGen;
use freeprod_core::{FreeProduct, SeparationCertificate, Separator, Word};

pub const SEED: u64 = 0x5eed;

/// `count` random words of exactly `len` letters over the standard groups.
pub fn words(fp: &FreeProduct, len: usize, count: usize) -> Vec<Word> {
    let gen = WordGen { min_len: len, max_len: len, ..WordGen::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ len as u64);
    (0..count).map(|_| gen.word(fp.groups(), &mut rng)).collect()
}

/// Words of length `len` that do not reduce to 1.
pub fn nonidentity_words(fp: &FreeProduct, len: usize, count: usize) -> Vec<Word> {
    let gen = WordGen { min_len: len, max_len: len, ..WordGen::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ len as u64);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        if let Some(w) = gen.nonidentity_word(fp, &mut rng) {
            out.push(w);
        }
    }
    out
}

pub fn certificates(sep: &Separator, len: usize, count: usize) -> Vec<SeparationCertificate> {
    nonidentity_words(sep.free_product(), len, count)
        .iter()
        .map(|w| sep.separate_word_from_identity(w).expect("separable"))
        .collect()
}
