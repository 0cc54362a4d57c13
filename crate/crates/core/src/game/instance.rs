use super::{dot, GameError, Items, Player};
use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeSet;
use std::path::Path;

/// Size of the published negotiation database the generator is compared with.
pub const REFERENCE_DB_COUNT: usize = 6796;

/// Largest item count or per-unit value an instance may carry.
pub(crate) const MAX_ITEM: u8 = 10;

/// A bargaining configuration: pool counts and both private valuations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Instance {
    pub pool: Items,
    pub w1: Items,
    pub w2: Items,
}

impl Instance {
    /// Builds an instance, checking that both players value the pool at
    /// `total_value`. Zero pool counts are accepted for synthetic instances.
    pub fn new(pool: Items, w1: Items, w2: Items) -> Result<Self, GameError> {
        let inst = Instance { pool, w1, w2 };
        inst.validate(10)?;
        Ok(inst)
    }

    pub fn validate(&self, total_value: u32) -> Result<(), GameError> {
        if self.pool.iter().chain(&self.w1).chain(&self.w2).any(|&x| x > MAX_ITEM) {
            return Err(GameError::InvalidInstance(format!("{self:?}: entries must not exceed {MAX_ITEM}")));
        }
        for (p, w) in [(1, &self.w1), (2, &self.w2)] {
            let v = dot(&self.pool, w);
            if v != total_value {
                return Err(GameError::InvalidInstance(format!(
                    "{self:?}: player {p} values the pool at {v}, expected {total_value}"
                )));
            }
        }
        Ok(())
    }

    pub fn valuation(&self, player: Player) -> &Items {
        match player {
            Player::One => &self.w1,
            Player::Two => &self.w2,
        }
    }

    /// The same pool with `player`'s valuation replaced.
    pub fn with_valuation(&self, player: Player, w: Items) -> Instance {
        let mut out = *self;
        match player {
            Player::One => out.w1 = w,
            Player::Two => out.w2 = w,
        }
        out
    }
}

/// Filter used to enumerate the instance database.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InstanceConstraints {
    pub min_count: u8,
    pub max_count: u8,
    pub min_total_items: u32,
    pub max_total_items: u32,
    pub max_value: u8,
    pub total_value: u32,
    /// Every item type must be valued by at least one player.
    pub require_coverage: bool,
}

impl Default for InstanceConstraints {
    fn default() -> Self {
        InstanceConstraints {
            min_count: 1,
            max_count: 4,
            min_total_items: 5,
            max_total_items: 7,
            max_value: 10,
            total_value: 10,
            require_coverage: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DbHeader {
    pub count: usize,
    /// Filter that produced the database, absent for hand-built databases.
    pub constraints: Option<InstanceConstraints>,
    pub reference_count: usize,
    /// Distinct valuation vectors for player one and player two.
    pub distinct_valuations: [usize; 2],
    /// Explanation recorded whenever `count` differs from `reference_count`.
    pub constraint_delta: Option<String>,
}

/// A deduplicated, canonically sorted list of instances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceDb {
    pub header: DbHeader,
    pub instances: Vec<Instance>,
}

impl InstanceDb {
    /// Wraps hand-picked instances, sorting and deduplicating them.
    pub fn from_instances(instances: Vec<Instance>) -> Result<Self, GameError> {
        Self::build(instances, None)
    }

    fn build(instances: Vec<Instance>, constraints: Option<InstanceConstraints>) -> Result<Self, GameError> {
        let total = constraints.as_ref().map_or(10, |c| c.total_value);
        for inst in &instances {
            inst.validate(total)?;
        }
        let set: BTreeSet<Instance> = instances.into_iter().collect();
        let instances: Vec<Instance> = set.into_iter().collect();
        let distinct = [
            instances.iter().map(|i| i.w1).collect::<BTreeSet<_>>().len(),
            instances.iter().map(|i| i.w2).collect::<BTreeSet<_>>().len(),
        ];
        let count = instances.len();
        let constraint_delta = match &constraints {
            Some(c) if count != REFERENCE_DB_COUNT => Some(format!(
                "exhaustive enumeration under per-type counts in [{}, {}], total items in [{}, {}], \
                 values in [0, {}], pool value {} for both players{} yields {} instances \
                 ({} distinct valuations per player); the reference database lists {} sampled \
                 configurations whose exact filter is unpublished",
                c.min_count,
                c.max_count,
                c.min_total_items,
                c.max_total_items,
                c.max_value,
                c.total_value,
                if c.require_coverage { ", every item valued by someone" } else { "" },
                count,
                distinct[0],
                REFERENCE_DB_COUNT,
            )),
            _ => None,
        };
        Ok(InstanceDb {
            header: DbHeader {
                count,
                constraints,
                reference_count: REFERENCE_DB_COUNT,
                distinct_valuations: distinct,
                constraint_delta,
            },
            instances,
        })
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> &Instance {
        &self.instances[rng.random_range(0..self.instances.len())]
    }

    /// Instances consistent with what `player` observes at the start of a game.
    pub fn consistent<'a>(
        &'a self,
        pool: &'a Items,
        player: Player,
        own: &'a Items,
    ) -> impl Iterator<Item = &'a Instance> + 'a {
        self.instances
            .iter()
            .filter(move |i| &i.pool == pool && i.valuation(player) == own)
    }

    /// SHA-256 over the canonical JSON of the instance list.
    pub fn content_hash(&self) -> String {
        let bytes = serde_json::to_vec(&self.instances).expect("instances serialize");
        hex::encode(Sha256::digest(&bytes))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("db serializes");
        s.push('\n');
        s
    }

    pub fn load(path: &Path) -> Result<Self, std::io::Error> {
        let text = std::fs::read_to_string(path)?;
        let db: InstanceDb =
            serde_json::from_str(&text).map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?;
        let total = db.header.constraints.as_ref().map_or(10, |c| c.total_value);
        for inst in &db.instances {
            inst.validate(total)
                .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e.to_string()))?;
        }
        Ok(db)
    }
}

/// Exhaustively enumerates every `(pool, w1, w2)` triple allowed by the
/// constraints, in lexicographic order. An unsatisfiable filter gives an
/// empty database.
pub fn enumerate_instances(constraints: &InstanceConstraints) -> InstanceDb {
    let c = constraints;
    let mut out = Vec::new();
    let counts = c.min_count..=c.max_count.min(MAX_ITEM);
    for a in counts.clone() {
        for b in counts.clone() {
            for d in counts.clone() {
                let pool = [a, b, d];
                let items: u32 = pool.iter().map(|&x| x as u32).sum();
                if items < c.min_total_items || items > c.max_total_items {
                    continue;
                }
                let vals = valuations(&pool, c.max_value.min(MAX_ITEM), c.total_value);
                for w1 in &vals {
                    for w2 in &vals {
                        if c.require_coverage && (0..3).any(|j| w1[j] == 0 && w2[j] == 0) {
                            continue;
                        }
                        out.push(Instance { pool, w1: *w1, w2: *w2 });
                    }
                }
            }
        }
    }
    InstanceDb::build(out, Some(constraints.clone())).expect("enumerated instances satisfy their constraints")
}

fn valuations(pool: &Items, max_value: u8, total: u32) -> Vec<Items> {
    let mut out = Vec::new();
    for x in 0..=max_value {
        for y in 0..=max_value {
            for z in 0..=max_value {
                let w = [x, y, z];
                if dot(pool, &w) == total {
                    out.push(w);
                }
            }
        }
    }
    out
}
