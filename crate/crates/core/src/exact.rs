//! Enumeration oracles for toy-sized games.
//!
//! Everything here walks the full game tree, so it is only usable for short
//! games on small pools. A node budget turns runaway enumerations into
//! [`GameError::TooLarge`] instead of hanging.

use crate::game::{dot, Action, GameError, GameParams, History, InfoState, Instance, InstanceDb, Items, Player};
use crate::policy::{Policy, PolicyError, ValueFn};
use rand::RngCore;
use std::collections::BTreeMap;

/// Maximum number of tree nodes a single oracle call may visit.
pub const NODE_LIMIT: u64 = 20_000_000;

struct Budget(u64);

impl Budget {
    fn tick(&mut self) -> Result<(), GameError> {
        self.0 += 1;
        if self.0 > NODE_LIMIT {
            return Err(GameError::TooLarge(format!("more than {NODE_LIMIT} nodes")));
        }
        Ok(())
    }
}

/// Continuation factor after `a` is played at round `round`: proposals that
/// complete a non-final round survive chance with probability `1 - ε`.
fn survive(params: &GameParams, round: u32, a: &Action) -> f64 {
    if matches!(a, Action::Offer(_)) && round + 1 < params.max_rounds {
        1.0 - params.terminate_prob
    } else {
        1.0
    }
}

/// Exact expected payoffs of `p1` against `p2` on one instance.
pub fn expected_payoffs_instance(
    inst: &Instance,
    params: &GameParams,
    p1: &dyn Policy,
    p2: &dyn Policy,
) -> Result<[f64; 2], PolicyError> {
    fn rec(h: &History, pols: [&dyn Policy; 2], budget: &mut Budget) -> Result<[f64; 2], PolicyError> {
        budget.tick()?;
        let Some(player) = h.current_player() else {
            return Ok(h.returns()?.payoffs);
        };
        let s = h.info_state(player);
        let probs = pols[player.index()].probs(&s)?;
        let mut out = [0.0; 2];
        for (a, p) in s.legal_actions()?.into_iter().zip(probs) {
            if p == 0.0 {
                continue;
            }
            let mut child = h.clone();
            child.push(a, false)?;
            let k = p * survive(&h.params, h.round, &a);
            let v = rec(&child, pols, budget)?;
            out[0] += k * v[0];
            out[1] += k * v[1];
        }
        Ok(out)
    }
    let h = History::new(*inst, *params)?;
    rec(&h, [p1, p2], &mut Budget(0))
}

/// Exact expected payoffs averaged uniformly over the database.
pub fn expected_payoffs(
    db: &InstanceDb,
    params: &GameParams,
    p1: &dyn Policy,
    p2: &dyn Policy,
) -> Result<[f64; 2], PolicyError> {
    let mut total = [0.0; 2];
    for inst in &db.instances {
        let v = expected_payoffs_instance(inst, params, p1, p2)?;
        total[0] += v[0];
        total[1] += v[1];
    }
    let n = db.len() as f64;
    Ok([total[0] / n, total[1] / n])
}

/// Value of the best response for seat `br` against `opponent`, averaged
/// over the database. The responder conditions only on its infostate, so
/// hidden opponent valuations are carried as a weight vector.
pub fn best_response_value(
    db: &InstanceDb,
    params: &GameParams,
    br: Player,
    opponent: &dyn Policy,
) -> Result<f64, PolicyError> {
    let mut groups: BTreeMap<(Items, Items), BTreeMap<Items, f64>> = BTreeMap::new();
    for inst in &db.instances {
        *groups
            .entry((inst.pool, *inst.valuation(br)))
            .or_default()
            .entry(*inst.valuation(br.other()))
            .or_default() += 1.0 / db.len() as f64;
    }
    let mut budget = Budget(0);
    let mut total = 0.0;
    for ((pool, w_br), opp) in groups {
        let (opp_vals, weights): (Vec<Items>, Vec<f64>) = opp.into_iter().unzip();
        let ctx = BrCtx { params, br, pool, w_br, opp_vals: &opp_vals, opponent };
        total += ctx.rec(&mut Vec::new(), &weights, &mut budget)?;
    }
    Ok(total)
}

struct BrCtx<'a> {
    params: &'a GameParams,
    br: Player,
    pool: Items,
    w_br: Items,
    opp_vals: &'a [Items],
    opponent: &'a dyn Policy,
}

impl BrCtx<'_> {
    fn agreement_value(&self, offers: &[Items]) -> f64 {
        let t = offers.len() as u32;
        let o = offers[offers.len() - 1];
        let proposer = Player::from_index(offers.len() - 1);
        let share = if proposer == self.br { o } else { [self.pool[0] - o[0], self.pool[1] - o[1], self.pool[2] - o[2]] };
        self.params.discount.powi(t as i32) * dot(&self.w_br, &share) as f64
    }

    fn child(&self, offers: &mut Vec<Items>, a: Action, weights: &[f64], budget: &mut Budget) -> Result<f64, PolicyError> {
        let mass: f64 = weights.iter().sum();
        match a {
            Action::Agree => Ok(mass * self.agreement_value(offers)),
            Action::Offer(o) => {
                let k = survive(self.params, offers.len() as u32, &a);
                offers.push(o);
                let v = self.rec(offers, weights, budget);
                offers.pop();
                Ok(k * v?)
            }
        }
    }

    fn rec(&self, offers: &mut Vec<Items>, weights: &[f64], budget: &mut Budget) -> Result<f64, PolicyError> {
        budget.tick()?;
        let round = offers.len() as u32;
        if round >= self.params.max_rounds {
            return Ok(0.0);
        }
        let mover = Player::from_index(round as usize);
        let mut probe =
            InfoState { player: mover, pool: self.pool, own_valuation: self.w_br, round, offers: offers.clone(), max_rounds: self.params.max_rounds };
        let actions = probe.legal_actions()?;
        if mover == self.br {
            let mut best = f64::NEG_INFINITY;
            for a in actions {
                best = best.max(self.child(offers, a, weights, budget)?);
            }
            return Ok(best);
        }
        let mut per_val = Vec::with_capacity(self.opp_vals.len());
        for w in self.opp_vals {
            probe.own_valuation = *w;
            per_val.push(self.opponent.probs(&probe)?);
        }
        let mut total = 0.0;
        for (i, a) in actions.into_iter().enumerate() {
            let next: Vec<f64> = weights.iter().zip(&per_val).map(|(w, p)| w * p[i]).collect();
            if next.iter().all(|&x| x == 0.0) {
                continue;
            }
            total += self.child(offers, a, &next, budget)?;
        }
        Ok(total)
    }
}

/// Sum over seats of the gain from deviating to a best response.
pub fn sum_regret(db: &InstanceDb, params: &GameParams, p1: &dyn Policy, p2: &dyn Policy) -> Result<f64, PolicyError> {
    let u = expected_payoffs(db, params, p1, p2)?;
    let b1 = best_response_value(db, params, Player::One, p2)?;
    let b2 = best_response_value(db, params, Player::Two, p1)?;
    Ok((b1 - u[0]) + (b2 - u[1]))
}

/// Subgame-perfect payoffs of the perfect-information game from `h`: each
/// mover maximises its own payoff, ties going to the canonically first action.
pub fn perfect_info_values(h: &History) -> Result<[f64; 2], PolicyError> {
    fn rec(h: &History, budget: &mut Budget) -> Result<[f64; 2], PolicyError> {
        budget.tick()?;
        let Some(player) = h.current_player() else {
            return Ok(h.returns()?.payoffs);
        };
        let mut best: Option<[f64; 2]> = None;
        for a in h.legal_actions()? {
            let mut child = h.clone();
            child.push(a, false)?;
            let k = survive(&h.params, h.round, &a);
            let v = rec(&child, budget)?;
            let v = [k * v[0], k * v[1]];
            if best.is_none_or(|b| v[player.index()] > b[player.index()]) {
                best = Some(v);
            }
        }
        Ok(best.expect("non-terminal histories have legal actions"))
    }
    rec(h, &mut Budget(0))
}

/// [`perfect_info_values`] as a leaf evaluator.
#[derive(Debug, Clone, Copy, Default)]
pub struct PerfectInfoValue;

impl ValueFn for PerfectInfoValue {
    fn values(&self, _s: &InfoState, h: &History, _rng: &mut dyn RngCore) -> Result<[f64; 2], PolicyError> {
        perfect_info_values(h)
    }
}
