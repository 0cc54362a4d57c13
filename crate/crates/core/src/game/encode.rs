use super::InfoState;

/// Version of the observation layout, sent in the external-policy handshake.
pub const ENCODING_VERSION: u32 = 1;

/// Length of [`encode_observation`] for round cap `max_rounds`: `4T + 9`.
///
/// Layout: role one-hot (2), pool counts (3), own valuation (3), round
/// one-hot over `0..=T` (T + 1), then `T` offer slots of 3 entries each,
/// unused slots filled with -1.
pub fn encoding_len(max_rounds: u32) -> usize {
    4 * max_rounds as usize + 9
}

/// Fixed-length, lossless numeric encoding of an infostate.
pub fn encode_observation(s: &InfoState) -> Vec<f64> {
    let t_cap = s.max_rounds as usize;
    let mut v = Vec::with_capacity(encoding_len(s.max_rounds));
    v.extend([0.0; 2]);
    v[s.player.index()] = 1.0;
    v.extend(s.pool.iter().map(|&x| x as f64));
    v.extend(s.own_valuation.iter().map(|&x| x as f64));
    let round_start = v.len();
    v.extend(std::iter::repeat_n(0.0, t_cap + 1));
    v[round_start + (s.round as usize).min(t_cap)] = 1.0;
    for slot in 0..t_cap {
        match s.offers.get(slot) {
            Some(o) => v.extend(o.iter().map(|&x| x as f64)),
            None => v.extend([-1.0; 3]),
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{Action, GameParams, History, Instance, Player};
    use std::collections::HashMap;

    #[test]
    fn golden_length_for_ten_rounds() {
        assert_eq!(encoding_len(10), 49);
        let inst = Instance::new([4, 4, 2], [1, 1, 1], [0, 2, 1]).unwrap();
        let h = History::new(inst, GameParams::new(10, 0.0, 1.0).unwrap()).unwrap();
        assert_eq!(encode_observation(&h.info_state(Player::One)).len(), 49);
    }

    #[test]
    fn layout_of_a_second_mover_observation() {
        let inst = Instance::new([1, 2, 3], [1, 3, 1], [2, 1, 2]).unwrap();
        let mut h = History::new(inst, GameParams::new(2, 0.0, 1.0).unwrap()).unwrap();
        h.push(Action::Offer([1, 2, 0]), false).unwrap();
        let v = encode_observation(&h.info_state(Player::Two));
        let expect = [
            0.0, 1.0, // role
            1.0, 2.0, 3.0, // pool
            2.0, 1.0, 2.0, // own valuation
            0.0, 1.0, 0.0, // round one-hot
            1.0, 2.0, 0.0, // offer 1
            -1.0, -1.0, -1.0, // empty slot
        ];
        assert_eq!(v, expect);
    }

    /// Every infostate of a small game encodes to a distinct vector.
    #[test]
    fn injective_over_small_game() {
        let inst = Instance::new([1, 1, 1], [5, 5, 0], [0, 5, 5]).unwrap();
        let params = GameParams::new(3, 0.0, 1.0).unwrap();
        let mut seen: HashMap<Vec<i64>, String> = HashMap::new();
        let mut stack = vec![History::new(inst, params).unwrap()];
        while let Some(h) = stack.pop() {
            if h.is_terminal() {
                continue;
            }
            for p in [Player::One, Player::Two] {
                let s = h.info_state(p);
                let enc: Vec<i64> = encode_observation(&s).iter().map(|x| *x as i64).collect();
                assert_eq!(encode_observation(&s), encode_observation(&s));
                if let Some(prev) = seen.insert(enc, s.key()) {
                    assert_eq!(prev, s.key());
                }
            }
            for a in h.legal_actions().unwrap() {
                let mut c = h.clone();
                c.push(a, false).unwrap();
                stack.push(c);
            }
        }
    }
}
