//! Sequential halving over the root actions.

/// Per-epoch widths and per-action visit quotas.
///
/// With `m` candidate actions the widths are `m, ⌈m/2⌉, …, 2` and the quota
/// at epoch `e` is `⌊num_sim / (width_e · E)⌋` (at least one), where `E` is the
/// number of epochs. For a power-of-two `m = K` this is the textbook
/// `⌊num_sim / ((K / 2^e) · log2 K)⌋`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalvingSchedule {
    pub num_sim: usize,
    pub widths: Vec<usize>,
    pub quotas: Vec<usize>,
}

impl HalvingSchedule {
    pub fn new(num_sim: usize, m: usize) -> Self {
        assert!(m >= 1, "need at least one action");
        let mut widths = Vec::new();
        let mut w = m;
        while w > 1 {
            widths.push(w);
            w = w.div_ceil(2);
        }
        let epochs = widths.len();
        let quotas = widths.iter().map(|&w| (num_sim / (w * epochs)).max(1)).collect();
        HalvingSchedule { num_sim, widths, quotas }
    }

    /// Simulations the quotas account for.
    pub fn scheduled(&self) -> usize {
        self.widths.iter().zip(&self.quotas).map(|(w, q)| w * q).sum()
    }

    /// Budget left after the quotas, spent round-robin in the last epoch.
    pub fn leftover(&self) -> usize {
        self.num_sim.saturating_sub(self.scheduled())
    }
}

/// Progress of sequential halving during one search.
#[derive(Debug, Clone)]
pub struct HalvingState {
    pub schedule: HalvingSchedule,
    pub epoch: usize,
    /// Surviving action indices, best first.
    pub survivors: Vec<usize>,
    /// Visits in the current epoch, aligned with `survivors`.
    pub epoch_visits: Vec<usize>,
}

impl HalvingState {
    /// Starts from `ranked`, the candidate actions sorted by initial score.
    pub fn new(num_sim: usize, ranked: Vec<usize>) -> Self {
        let schedule = HalvingSchedule::new(num_sim, ranked.len());
        let n = ranked.len();
        HalvingState { schedule, epoch: 0, survivors: ranked, epoch_visits: vec![0; n] }
    }

    fn in_last_epoch(&self) -> bool {
        self.epoch + 1 >= self.schedule.widths.len()
    }

    /// The next root action to simulate. `rank` orders a set of action
    /// indices by current score, best first; it is consulted when halving.
    /// The final epoch never closes here: it absorbs any leftover budget
    /// round-robin, and the caller halves to the winner after the last
    /// simulation.
    pub fn next(&mut self, rank: impl Fn(&[usize]) -> Vec<usize>) -> usize {
        if self.survivors.len() > 1 && !self.in_last_epoch() {
            let quota = self.schedule.quotas[self.epoch];
            if self.epoch_visits.iter().all(|&v| v >= quota) {
                self.halve(&rank);
            }
        }
        let i = (0..self.survivors.len()).min_by_key(|&i| (self.epoch_visits[i], i)).expect("survivors are never empty");
        self.epoch_visits[i] += 1;
        self.survivors[i]
    }

    /// Keeps the top half (rounded up) by `rank` and opens the next epoch.
    pub fn halve(&mut self, rank: &impl Fn(&[usize]) -> Vec<usize>) {
        let keep = self.survivors.len().div_ceil(2).max(1);
        let mut ranked = rank(&self.survivors);
        ranked.truncate(keep);
        self.survivors = ranked;
        self.epoch_visits = vec![0; self.survivors.len()];
        self.epoch += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn published_defaults() {
        let s = HalvingSchedule::new(200, 16);
        assert_eq!(s.widths, vec![16, 8, 4, 2]);
        assert_eq!(s.quotas, vec![3, 6, 12, 25]);
        assert_eq!(s.scheduled(), 194);
        assert_eq!(s.leftover(), 6);
    }

    #[test]
    fn two_actions_single_epoch() {
        let s = HalvingSchedule::new(51, 2);
        assert_eq!(s.widths, vec![2]);
        assert_eq!(s.quotas, vec![25]);
    }

    #[test]
    fn odd_width_rounds_up() {
        let s = HalvingSchedule::new(200, 9);
        assert_eq!(s.widths, vec![9, 5, 3, 2]);
    }

    #[test]
    fn visits_follow_quotas_then_leftover() {
        let mut st = HalvingState::new(200, (0..16).collect());
        // rank by index: lower index is better
        let rank = |xs: &[usize]| {
            let mut v = xs.to_vec();
            v.sort();
            v
        };
        let mut counts = vec![0usize; 16];
        for _ in 0..200 {
            counts[st.next(rank)] += 1;
        }
        assert_eq!(st.survivors, vec![0, 1]);
        // 3 + 6 + 12 + 25 + 3 leftover each for the last two
        assert_eq!(counts[0], 49);
        assert_eq!(counts[1], 49);
        assert_eq!(counts[2], 3 + 6 + 12);
        assert_eq!(counts[4], 3 + 6);
        assert_eq!(counts[8], 3);
        assert_eq!(counts.iter().sum::<usize>(), 200);
        st.halve(&rank);
        assert_eq!(st.survivors, vec![0]);
    }
}
