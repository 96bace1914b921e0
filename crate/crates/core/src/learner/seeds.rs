use std::collections::{BTreeMap, HashMap};
use std::io::BufRead;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{SeedSelection, SenseInventory, TrainerConfig};
use crate::corpus::Context;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Seed {
    pub context_id: u64,
    pub sense: String,
}

/// Picks `per_sense` gold-labeled contexts for every sense of the inventory.
///
/// Candidates are the contexts present in `contexts` whose id has a gold
/// sense, in context order. `Random` draws from them with a ChaCha8 stream
/// seeded by `rng_seed`, senses visited in inventory order. The returned
/// seeds are sorted by context id.
pub fn select_seeds(
    contexts: &[Context],
    gold: &BTreeMap<u64, String>,
    inventory: &SenseInventory,
    per_sense: usize,
    selection: SeedSelection,
    rng_seed: u64,
) -> Result<Vec<Seed>> {
    let mut by_sense: Vec<Vec<u64>> = vec![Vec::new(); inventory.len()];
    for ctx in contexts {
        if let Some(sense) = gold.get(&ctx.id) {
            let s = inventory.index_of(sense).ok_or_else(|| {
                Error::GoldMismatch(format!(
                    "context {} has gold sense {sense:?} outside the inventory",
                    ctx.id
                ))
            })?;
            by_sense[s].push(ctx.id);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut seeds = Vec::with_capacity(per_sense * inventory.len());
    for (sense, ids) in inventory.senses().iter().zip(&by_sense) {
        if ids.len() < per_sense {
            return Err(Error::InsufficientSeeds {
                sense: sense.clone(),
                needed: per_sense,
                found: ids.len(),
            });
        }
        let chosen: Vec<u64> = match selection {
            SeedSelection::CorpusOrder => ids[..per_sense].to_vec(),
            SeedSelection::Random => rand::seq::index::sample(&mut rng, ids.len(), per_sense)
                .into_iter()
                .map(|i| ids[i])
                .collect(),
        };
        seeds.extend(chosen.into_iter().map(|context_id| Seed {
            context_id,
            sense: sense.clone(),
        }));
    }
    seeds.sort();
    Ok(seeds)
}

/// Marks the given contexts as seeds labeled at iteration 0.
pub fn apply_seeds(contexts: &mut [Context], seeds: &[Seed], inventory: &SenseInventory) -> Result<()> {
    let position: HashMap<u64, usize> = contexts.iter().enumerate().map(|(i, c)| (c.id, i)).collect();
    for seed in seeds {
        if inventory.index_of(&seed.sense).is_none() {
            return Err(Error::Seed(format!(
                "sense {:?} of context {} is not one of {:?}",
                seed.sense,
                seed.context_id,
                inventory.senses()
            )));
        }
        let &i = position
            .get(&seed.context_id)
            .ok_or_else(|| Error::Seed(format!("unknown context id {}", seed.context_id)))?;
        contexts[i].mark_seed(&seed.sense)?;
    }
    Ok(())
}

/// Gold-driven seeding: select per `config` and mark the chosen contexts.
pub fn seed_labels(
    contexts: &mut [Context],
    inventory: &SenseInventory,
    config: &TrainerConfig,
    gold: &BTreeMap<u64, String>,
) -> Result<Vec<Seed>> {
    let seeds = select_seeds(
        contexts,
        gold,
        inventory,
        config.seeds_per_sense,
        config.seed_selection,
        config.rng_seed,
    )?;
    apply_seeds(contexts, &seeds, inventory)?;
    Ok(seeds)
}

/// `context_id<TAB>sense_id` per line.
pub fn write_seed_file(seeds: &[Seed]) -> String {
    seeds
        .iter()
        .map(|s| format!("{}\t{}\n", s.context_id, s.sense))
        .collect()
}

pub fn read_seed_file<R: BufRead>(reader: R) -> Result<Vec<Seed>> {
    let mut seeds = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (id, sense) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse("seeds", idx + 1, "expected context_id<TAB>sense"))?;
        let context_id = id
            .parse()
            .map_err(|_| Error::parse("seeds", idx + 1, format!("bad context id {id:?}")))?;
        seeds.push(Seed {
            context_id,
            sense: sense.to_string(),
        });
    }
    Ok(seeds)
}
