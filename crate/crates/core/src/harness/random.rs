use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::market::Market;
use crate::preference::{CpNet, ImportanceOrder, LexPreference, Preference, Profile};

/// Parameters of a random lexicographic market.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomSpec {
    pub seed: u64,
    pub n: usize,
    pub p: usize,
    /// No dependencies between types.
    pub separable_only: bool,
    /// Every agent uses the same importance order.
    pub shared_importance: bool,
}

impl RandomSpec {
    pub fn new(seed: u64, n: usize, p: usize) -> Self {
        RandomSpec {
            seed,
            n,
            p,
            separable_only: false,
            shared_importance: false,
        }
    }
}

// Stream 0 holds the shared importance order and agent j draws from stream
// j + 1, so each agent's preference can be regenerated on its own.
fn stream(seed: u64, s: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(s);
    rng
}

fn shuffled(k: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut v: Vec<usize> = (0..k).collect();
    v.shuffle(rng);
    v
}

/// A random O-legal lexicographic preference. Each type depends on each
/// more important type with probability one half; rows are uniform.
pub fn random_lex(rng: &mut ChaCha8Rng, n: usize, importance: ImportanceOrder, separable: bool) -> LexPreference {
    let order = importance.types().to_vec();
    let p = order.len();
    let mut parents = vec![Vec::new(); p];
    if !separable {
        for (pos, &t) in order.iter().enumerate() {
            for &q in &order[..pos] {
                if rng.gen_bool(0.5) {
                    parents[t].push(q);
                }
            }
        }
    }
    let rows = parents
        .iter()
        .map(|pa| (0..n.pow(pa.len() as u32)).map(|_| shuffled(n, rng)).collect())
        .collect();
    let net = CpNet::new(n, parents, rows).expect("forward parents are acyclic");
    LexPreference::new(importance, net).expect("parents precede children")
}

pub fn random_profile(spec: RandomSpec) -> (Market, Profile) {
    let market = Market::new(spec.n, spec.p).expect("nonempty market");
    let shared = ImportanceOrder::new(shuffled(spec.p, &mut stream(spec.seed, 0))).expect("permutation");
    let prefs = (0..spec.n)
        .map(|j| {
            let mut rng = stream(spec.seed, j as u64 + 1);
            let importance = if spec.shared_importance {
                shared.clone()
            } else {
                ImportanceOrder::new(shuffled(spec.p, &mut rng)).expect("permutation")
            };
            Preference::Lex(random_lex(&mut rng, spec.n, importance, spec.separable_only))
        })
        .collect();
    let profile = Profile::new(&market, prefs).expect("shape matches");
    (market, profile)
}
