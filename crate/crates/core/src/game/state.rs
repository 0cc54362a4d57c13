use super::instance::MAX_ITEM;
use super::{dot, GameError, GameParams, Instance, Items, Player};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Wire id of [`Action::Agree`]. Offers use `o0 * 121 + o1 * 11 + o2`.
pub const AGREE_ACTION_ID: u32 = 1331;

/// A move: propose a split (the proposer's own share) or accept the standing offer.
///
/// The derived order is the canonical action order: offers lexicographically,
/// then `Agree`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Action {
    Offer(Items),
    Agree,
}

impl Action {
    pub fn id(&self) -> u32 {
        match self {
            Action::Offer(o) => o[0] as u32 * 121 + o[1] as u32 * 11 + o[2] as u32,
            Action::Agree => AGREE_ACTION_ID,
        }
    }

    pub fn from_id(id: u32) -> Option<Action> {
        if id == AGREE_ACTION_ID {
            return Some(Action::Agree);
        }
        if id > AGREE_ACTION_ID {
            return None;
        }
        Some(Action::Offer([(id / 121) as u8, ((id / 11) % 11) as u8, (id % 11) as u8]))
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Offer(o) => write!(f, "offer[{},{},{}]", o[0], o[1], o[2]),
            Action::Agree => write!(f, "agree"),
        }
    }
}

/// All proposals `0 <= o <= pool`, lexicographic.
pub fn offers_for_pool(pool: &Items) -> Vec<Items> {
    let mut out = Vec::with_capacity((pool[0] as usize + 1) * (pool[1] as usize + 1) * (pool[2] as usize + 1));
    for a in 0..=pool[0] {
        for b in 0..=pool[1] {
            for c in 0..=pool[2] {
                out.push([a, b, c]);
            }
        }
    }
    out
}

fn legal_for(pool: &Items, has_offer: bool) -> Vec<Action> {
    let mut acts: Vec<Action> = offers_for_pool(pool).into_iter().map(Action::Offer).collect();
    if has_offer {
        acts.push(Action::Agree);
    }
    acts
}

fn legal_count(pool: &Items, has_offer: bool) -> usize {
    (pool[0] as usize + 1) * (pool[1] as usize + 1) * (pool[2] as usize + 1) + usize::from(has_offer)
}

fn is_legal(pool: &Items, has_offer: bool, a: &Action) -> bool {
    match a {
        Action::Agree => has_offer,
        Action::Offer(o) => o.iter().zip(pool).all(|(x, c)| x <= c),
    }
}

/// Terminal result of a game.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub payoffs: [f64; 2],
    pub agreed: bool,
    pub agreement_round: Option<u32>,
}

/// Full world trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct History {
    pub instance: Instance,
    pub params: GameParams,
    pub actions: Vec<Action>,
    pub chance_terminated: bool,
    /// Number of proposals made so far.
    pub round: u32,
    agreed: bool,
}

impl History {
    pub fn new(instance: Instance, params: GameParams) -> Result<Self, GameError> {
        params.validate()?;
        if instance.pool.iter().any(|&c| c > MAX_ITEM) {
            return Err(GameError::InvalidInstance(format!("{instance:?}")));
        }
        Ok(History { instance, params, actions: Vec::new(), chance_terminated: false, round: 0, agreed: false })
    }

    pub fn is_terminal(&self) -> bool {
        self.agreed || self.chance_terminated || self.round >= self.params.max_rounds
    }

    pub fn agreed(&self) -> bool {
        self.agreed
    }

    /// The player to move, or `None` at a terminal history.
    pub fn current_player(&self) -> Option<Player> {
        (!self.is_terminal()).then(|| Player::from_index(self.round as usize))
    }

    pub fn offers(&self) -> impl Iterator<Item = &Items> {
        self.actions.iter().filter_map(|a| match a {
            Action::Offer(o) => Some(o),
            Action::Agree => None,
        })
    }

    /// The most recent proposal with its proposer.
    pub fn standing_offer(&self) -> Option<(Player, Items)> {
        if self.round == 0 {
            return None;
        }
        self.offers().last().map(|o| (Player::from_index(self.round as usize - 1), *o))
    }

    pub fn legal_actions(&self) -> Result<Vec<Action>, GameError> {
        if self.is_terminal() {
            return Err(GameError::Terminal);
        }
        Ok(legal_for(&self.instance.pool, self.round > 0))
    }

    pub fn num_legal_actions(&self) -> usize {
        legal_count(&self.instance.pool, self.round > 0)
    }

    /// Whether applying `a` completes a round that is followed by a chance draw.
    pub fn chance_follows(&self, a: &Action) -> bool {
        matches!(a, Action::Offer(_)) && self.round + 1 < self.params.max_rounds
    }

    /// Applies `a` with the chance outcome given explicitly. `terminate` is
    /// ignored unless a chance draw follows `a`.
    pub fn push(&mut self, a: Action, terminate: bool) -> Result<(), GameError> {
        if self.is_terminal() {
            return Err(GameError::Terminal);
        }
        if !is_legal(&self.instance.pool, self.round > 0, &a) {
            let player = Player::from_index(self.round as usize);
            return Err(GameError::IllegalAction { action: a, key: self.info_state(player).key() });
        }
        let chance = self.chance_follows(&a);
        self.actions.push(a);
        match a {
            Action::Agree => self.agreed = true,
            Action::Offer(_) => {
                self.round += 1;
                if chance && terminate {
                    self.chance_terminated = true;
                }
            }
        }
        Ok(())
    }

    /// Applies `a`, drawing chance termination from `rng` when a round completes.
    pub fn step<R: Rng + ?Sized>(&mut self, a: Action, rng: &mut R) -> Result<(), GameError> {
        let eps = self.params.terminate_prob;
        let terminate = self.chance_follows(&a) && eps > 0.0 && {
            // legality is checked in push; drawing first keeps the stream aligned either way
            rng.random::<f64>() < eps
        };
        self.push(a, terminate)
    }

    /// Pure variant of [`History::step`].
    pub fn apply<R: Rng + ?Sized>(&self, a: Action, rng: &mut R) -> Result<History, GameError> {
        let mut h = self.clone();
        h.step(a, rng)?;
        Ok(h)
    }

    pub fn returns(&self) -> Result<Outcome, GameError> {
        if !self.is_terminal() {
            return Err(GameError::NotTerminal);
        }
        if !self.agreed {
            return Ok(Outcome { payoffs: [0.0, 0.0], agreed: false, agreement_round: None });
        }
        let (proposer, o) = self.standing_offer().expect("agreement requires a standing offer");
        let pool = &self.instance.pool;
        let rest = [pool[0] - o[0], pool[1] - o[1], pool[2] - o[2]];
        let t = self.round;
        let disc = self.params.discount.powi(t as i32);
        let mut payoffs = [0.0; 2];
        payoffs[proposer.index()] = disc * dot(self.instance.valuation(proposer), &o) as f64;
        let other = proposer.other();
        payoffs[other.index()] = disc * dot(self.instance.valuation(other), &rest) as f64;
        Ok(Outcome { payoffs, agreed: true, agreement_round: Some(t) })
    }

    /// What `player` knows at this history.
    pub fn info_state(&self, player: Player) -> InfoState {
        InfoState {
            player,
            pool: self.instance.pool,
            own_valuation: *self.instance.valuation(player),
            round: self.round,
            offers: self.offers().copied().collect(),
            max_rounds: self.params.max_rounds,
        }
    }
}

/// A player's information: role, pool, own valuation and the public offer history.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InfoState {
    pub player: Player,
    pub pool: Items,
    pub own_valuation: Items,
    pub round: u32,
    /// Every proposal so far; proposer `i % 2` made proposal `i`.
    pub offers: Vec<Items>,
    pub max_rounds: u32,
}

impl InfoState {
    pub fn is_terminal(&self) -> bool {
        self.round >= self.max_rounds
    }

    /// Whether it is this player's turn (true at every decision infostate).
    pub fn to_move(&self) -> bool {
        Player::from_index(self.round as usize) == self.player
    }

    pub fn legal_actions(&self) -> Result<Vec<Action>, GameError> {
        if self.is_terminal() {
            return Err(GameError::Terminal);
        }
        Ok(legal_for(&self.pool, !self.offers.is_empty()))
    }

    pub fn num_legal_actions(&self) -> usize {
        legal_count(&self.pool, !self.offers.is_empty())
    }

    /// Position of `a` in the canonical legal action list.
    pub fn action_index(&self, a: &Action) -> Option<usize> {
        let has_offer = !self.offers.is_empty();
        if !is_legal(&self.pool, has_offer, a) {
            return None;
        }
        Some(match a {
            Action::Agree => legal_count(&self.pool, false),
            Action::Offer(o) => {
                let (b, c) = (self.pool[1] as usize + 1, self.pool[2] as usize + 1);
                o[0] as usize * b * c + o[1] as usize * c + o[2] as usize
            }
        })
    }

    /// The proposal awaiting a response, if any.
    pub fn standing_offer(&self) -> Option<&Items> {
        self.offers.last()
    }

    /// Parses a key produced by [`InfoState::key`].
    pub fn from_key(key: &str, max_rounds: u32) -> Result<InfoState, GameError> {
        let bad = || GameError::InvalidParams(format!("malformed infostate key `{key}`"));
        let parts: Vec<&str> = key.split('|').collect();
        if parts.len() != 4 {
            return Err(bad());
        }
        let player = match parts[0] {
            "1" => Player::One,
            "2" => Player::Two,
            _ => return Err(bad()),
        };
        let triple = |t: &str| -> Result<Items, GameError> {
            let v: Vec<u8> = t.split(',').map(|x| x.parse::<u8>()).collect::<Result<_, _>>().map_err(|_| bad())?;
            <[u8; 3]>::try_from(v).map_err(|_| bad())
        };
        let pool = triple(parts[1])?;
        let own_valuation = triple(parts[2])?;
        let offers: Vec<Items> = if parts[3].is_empty() {
            Vec::new()
        } else {
            parts[3].split(';').map(triple).collect::<Result<_, _>>()?
        };
        let round = offers.len() as u32;
        if round >= max_rounds || Player::from_index(round as usize) != player {
            return Err(bad());
        }
        if offers.iter().any(|o| o.iter().zip(&pool).any(|(x, c)| x > c)) {
            return Err(bad());
        }
        Ok(InfoState { player, pool, own_valuation, round, offers, max_rounds })
    }

    /// Canonical string key, e.g. `2|1,2,3|2,1,2|1,2,0`.
    pub fn key(&self) -> String {
        let mut k = format!(
            "{}|{},{},{}|{},{},{}|",
            self.player.index() + 1,
            self.pool[0],
            self.pool[1],
            self.pool[2],
            self.own_valuation[0],
            self.own_valuation[1],
            self.own_valuation[2]
        );
        let offers: Vec<String> = self.offers.iter().map(|o| format!("{},{},{}", o[0], o[1], o[2])).collect();
        k.push_str(&offers.join(";"));
        k
    }
}
